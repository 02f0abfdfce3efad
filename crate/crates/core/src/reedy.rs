//! Reedy structures on finite categories.
//!
//! A Reedy structure assigns every object a degree and singles out two wide
//! subcategories: direct morphisms strictly raise degree, inverse morphisms
//! strictly lower it, and every morphism factors uniquely as a direct one
//! after an inverse one (either part may be an identity). Morphisms in
//! neither class are allowed; they are recorded as general.
//!
//! Validation checks all of this exhaustively and caches the factorization
//! of every morphism, so `factor` is a lookup afterwards.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::{
    identity_name, validate_category, validate_functor, FiniteCategory, FunctorData,
    ProductStructure, RawCategory, RawFunctor,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MorphismClass {
    Direct,
    Inverse,
    General,
}

/// Reedy data riding on top of a validated category.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawReedy {
    pub degrees: BTreeMap<String, u32>,
    pub direct: BTreeSet<String>,
    pub inverse: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReedyCategory {
    base: FiniteCategory,
    degrees: Vec<u32>,
    /// Class per morphism; identity slots hold `General` and are never read
    /// through `class`, use the `_or_id` predicates instead.
    class: Vec<MorphismClass>,
    /// `(inverse part, direct part)` of each morphism.
    factored: Vec<(usize, usize)>,
}

pub fn validate_reedy(base: &FiniteCategory, raw: &RawReedy) -> Result<ReedyCategory> {
    for key in raw.degrees.keys() {
        if base.object_index(key).is_none() {
            return Err(Error::DanglingReference {
                context: "degree assignment".into(),
                missing: key.clone(),
            });
        }
    }
    let mut degrees = Vec::with_capacity(base.object_count());
    for o in base.objects() {
        let d = raw.degrees.get(o).ok_or_else(|| Error::BadElement {
            context: "degree assignment".into(),
            detail: format!("object `{o}` has no degree"),
        })?;
        degrees.push(*d);
    }

    let mut class = vec![MorphismClass::General; base.morphism_count()];
    for (set, which) in [(&raw.direct, MorphismClass::Direct), (&raw.inverse, MorphismClass::Inverse)] {
        for id in set {
            let m = base.morphism_index(id).ok_or_else(|| Error::DanglingReference {
                context: "Reedy classification".into(),
                missing: id.clone(),
            })?;
            if base.is_identity(m) {
                return Err(Error::BadElement {
                    context: "Reedy classification".into(),
                    detail: format!("identity `{id}` cannot be classified"),
                });
            }
            if which == MorphismClass::Inverse && raw.direct.contains(id) {
                return Err(Error::BadElement {
                    context: "Reedy classification".into(),
                    detail: format!("`{id}` is listed as both direct and inverse"),
                });
            }
            class[m] = which;
        }
    }

    for m in base.non_identity_morphisms() {
        let (ds, dd) = (degrees[base.src(m)], degrees[base.dst(m)]);
        match class[m] {
            MorphismClass::Direct if dd <= ds => {
                return Err(Error::DegreeViolation {
                    morphism: base.morphism_id(m).into(),
                    detail: format!("direct morphism must raise degree, got {ds} -> {dd}"),
                })
            }
            MorphismClass::Inverse if dd >= ds => {
                return Err(Error::DegreeViolation {
                    morphism: base.morphism_id(m).into(),
                    detail: format!("inverse morphism must lower degree, got {ds} -> {dd}"),
                })
            }
            _ => {}
        }
    }

    // Closure. Two non-identity direct morphisms compose to something whose
    // degree strictly rises, so the composite cannot be an identity and must
    // itself be direct; dually for inverse.
    for which in [MorphismClass::Direct, MorphismClass::Inverse] {
        let name = match which {
            MorphismClass::Direct => "direct",
            _ => "inverse",
        };
        for f in base.non_identity_morphisms() {
            if class[f] != which {
                continue;
            }
            for g in base.non_identity_morphisms() {
                if class[g] != which || base.dst(f) != base.src(g) {
                    continue;
                }
                let h = base.compose(f, g)?;
                if base.is_identity(h) || class[h] != which {
                    return Err(Error::NotClosed {
                        subcategory: name.into(),
                        first: base.morphism_id(f).into(),
                        then: base.morphism_id(g).into(),
                        composite: base.morphism_id(h).into(),
                    });
                }
            }
        }
    }

    // Unique factorization, identities included: the identity must factor
    // only as (identity, identity).
    let is_inv_or_id = |m: usize| base.is_identity(m) || class[m] == MorphismClass::Inverse;
    let is_dir_or_id = |m: usize| base.is_identity(m) || class[m] == MorphismClass::Direct;
    let mut factored = Vec::with_capacity(base.morphism_count());
    for g in 0..base.morphism_count() {
        let mut found: Option<(usize, usize)> = None;
        for c in 0..base.object_count() {
            for &e in base.hom(base.src(g), c) {
                if !is_inv_or_id(e) {
                    continue;
                }
                for &m in base.hom(c, base.dst(g)) {
                    if !is_dir_or_id(m) || base.compose(e, m)? != g {
                        continue;
                    }
                    if let Some((e0, m0)) = found {
                        return Err(Error::FactorizationAmbiguous {
                            morphism: base.morphism_id(g).into(),
                            inv1: base.morphism_id(e0).into(),
                            dir1: base.morphism_id(m0).into(),
                            inv2: base.morphism_id(e).into(),
                            dir2: base.morphism_id(m).into(),
                        });
                    }
                    found = Some((e, m));
                }
            }
        }
        match found {
            Some(pair) => factored.push(pair),
            None => {
                return Err(Error::FactorizationMissing {
                    morphism: base.morphism_id(g).into(),
                })
            }
        }
    }

    Ok(ReedyCategory {
        base: base.clone(),
        degrees,
        class,
        factored,
    })
}

impl ReedyCategory {
    pub fn base(&self) -> &FiniteCategory {
        &self.base
    }

    pub fn degree(&self, o: usize) -> u32 {
        self.degrees[o]
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.degrees.iter().copied().max()
    }

    /// Class of a non-identity morphism.
    pub fn class(&self, m: usize) -> MorphismClass {
        debug_assert!(!self.base.is_identity(m));
        self.class[m]
    }

    pub fn is_direct(&self, m: usize) -> bool {
        !self.base.is_identity(m) && self.class[m] == MorphismClass::Direct
    }

    pub fn is_inverse(&self, m: usize) -> bool {
        !self.base.is_identity(m) && self.class[m] == MorphismClass::Inverse
    }

    pub fn is_direct_or_id(&self, m: usize) -> bool {
        self.base.is_identity(m) || self.class[m] == MorphismClass::Direct
    }

    pub fn is_inverse_or_id(&self, m: usize) -> bool {
        self.base.is_identity(m) || self.class[m] == MorphismClass::Inverse
    }

    /// The unique `(inverse part, direct part)` of the morphism.
    pub fn factor(&self, m: usize) -> (usize, usize) {
        self.factored[m]
    }

    pub fn to_raw_reedy(&self) -> RawReedy {
        let mut raw = RawReedy::default();
        for (o, &d) in self.degrees.iter().enumerate() {
            raw.degrees.insert(self.base.object_id(o).into(), d);
        }
        for m in self.base.non_identity_morphisms() {
            let id = self.base.morphism_id(m).to_string();
            match self.class[m] {
                MorphismClass::Direct => {
                    raw.direct.insert(id);
                }
                MorphismClass::Inverse => {
                    raw.inverse.insert(id);
                }
                MorphismClass::General => {}
            }
        }
        raw
    }

    /// Wide subcategory of inverse morphisms (plus identities).
    pub fn inverse_subcategory(&self) -> FiniteCategory {
        self.wide_subcategory(MorphismClass::Inverse)
    }

    /// Wide subcategory of direct morphisms (plus identities).
    pub fn direct_subcategory(&self) -> FiniteCategory {
        self.wide_subcategory(MorphismClass::Direct)
    }

    fn wide_subcategory(&self, which: MorphismClass) -> FiniteCategory {
        let keep = |id: &str| {
            let m = self.base.morphism_index(id).unwrap();
            !self.base.is_identity(m) && self.class[m] == which
        };
        let raw = self.base.to_raw();
        let raw = RawCategory {
            objects: raw.objects,
            morphisms: raw.morphisms.into_iter().filter(|m| keep(&m.id)).collect(),
            compositions: raw
                .compositions
                .into_iter()
                .filter(|c| keep(&c.first) && keep(&c.then))
                .collect(),
        };
        validate_category(&raw).expect("wide subcategory of a valid Reedy category is valid")
    }

    /// Same category with direct and inverse exchanged; degrees unchanged.
    pub fn opposite(&self) -> ReedyCategory {
        let base = self.base.opposite();
        let raw = self.to_raw_reedy();
        let swapped = RawReedy {
            degrees: raw.degrees,
            direct: raw.inverse,
            inverse: raw.direct,
        };
        validate_reedy(&base, &swapped).expect("opposite of a Reedy category is Reedy")
    }
}

/// Full subcategory on the objects of degree at most `n`, with the inclusion
/// into the original category.
pub fn truncate(r: &ReedyCategory, n: u32) -> Result<(ReedyCategory, FunctorData)> {
    let base = r.base();
    let kept: Vec<&str> = (0..base.object_count())
        .filter(|&o| r.degree(o) <= n)
        .map(|o| base.object_id(o))
        .collect();
    let sub = base.full_subcategory(&kept)?;

    let raw = r.to_raw_reedy();
    let keep_mor = |id: &String| sub.morphism_index(id).is_some();
    let restricted = RawReedy {
        degrees: raw
            .degrees
            .into_iter()
            .filter(|(o, _)| sub.object_index(o).is_some())
            .collect(),
        direct: raw.direct.into_iter().filter(keep_mor).collect(),
        inverse: raw.inverse.into_iter().filter(keep_mor).collect(),
    };
    let reedy = validate_reedy(&sub, &restricted)?;

    let mut inc = RawFunctor::default();
    for o in sub.objects() {
        inc.on_objects.insert(o.clone(), o.clone());
    }
    for m in sub.non_identity_morphisms() {
        let id = sub.morphism_id(m);
        inc.on_morphisms.insert(id.into(), id.into());
    }
    let inclusion = validate_functor(&sub, base, &inc)?;
    Ok((reedy, inclusion))
}

pub fn product_reedy(a: &ReedyCategory, b: &ReedyCategory) -> Result<ReedyCategory> {
    Ok(product_reedy_many(&[a, b])?.0)
}

/// Product Reedy structure: degrees add; a tuple is direct when every
/// component is direct or an identity (and not all are identities), dually
/// for inverse; everything else is general.
pub fn product_reedy_many(
    factors: &[&ReedyCategory],
) -> Result<(ReedyCategory, ProductStructure)> {
    let bases: Vec<&FiniteCategory> = factors.iter().map(|r| r.base()).collect();
    let (cat, structure) = crate::fincat::product_many(&bases)?;

    let mut raw = RawReedy::default();
    for (o, t) in structure.object_components.iter().enumerate() {
        let degree = t
            .iter()
            .zip(factors)
            .map(|(&ob, r)| r.degree(ob))
            .sum::<u32>();
        raw.degrees.insert(cat.object_id(o).into(), degree);
    }
    for m in cat.non_identity_morphisms() {
        let t = &structure.morphism_components[m];
        let all_dir = t
            .iter()
            .zip(factors)
            .all(|(&c, r)| r.is_direct_or_id(c));
        let all_inv = t
            .iter()
            .zip(factors)
            .all(|(&c, r)| r.is_inverse_or_id(c));
        if all_dir {
            raw.direct.insert(cat.morphism_id(m).into());
        } else if all_inv {
            raw.inverse.insert(cat.morphism_id(m).into());
        }
    }
    let reedy = validate_reedy(&cat, &raw)?;
    Ok((reedy, structure))
}

/// A category whose objects stand for arrows of some base category, with the
/// functor down to the base remembered through `object_base` (where each
/// object sits) and `morphism_arrows` (the base morphism under each one).
#[derive(Debug, Clone)]
pub struct LabeledCategory {
    pub category: FiniteCategory,
    /// Per object: the arrow of the base category it stands for.
    pub object_arrows: Vec<String>,
    /// Per object: the base object it projects to.
    pub object_base: Vec<String>,
    /// Per morphism: the base morphism it projects to.
    pub morphism_arrows: Vec<String>,
}

impl LabeledCategory {
    /// Full subcategory on the given object indices, labels carried along.
    pub fn restrict(&self, keep: &[usize]) -> Result<LabeledCategory> {
        let ids: Vec<&str> = keep.iter().map(|&i| self.category.object_id(i)).collect();
        let sub = self.category.full_subcategory(&ids)?;
        let mut morphism_arrows = Vec::with_capacity(sub.morphism_count());
        for m in 0..sub.morphism_count() {
            let orig = self.category.morphism_index(sub.morphism_id(m)).unwrap();
            morphism_arrows.push(self.morphism_arrows[orig].clone());
        }
        Ok(LabeledCategory {
            category: sub,
            object_arrows: keep.iter().map(|&i| self.object_arrows[i].clone()).collect(),
            object_base: keep.iter().map(|&i| self.object_base[i].clone()).collect(),
            morphism_arrows,
        })
    }

    pub fn projection(&self, base: &FiniteCategory) -> Result<FunctorData> {
        let mut raw = RawFunctor::default();
        for (i, b) in self.object_base.iter().enumerate() {
            raw.on_objects
                .insert(self.category.object_id(i).to_string(), b.clone());
        }
        for m in self.category.non_identity_morphisms() {
            raw.on_morphisms.insert(
                self.category.morphism_id(m).to_string(),
                self.morphism_arrows[m].clone(),
            );
        }
        validate_functor(&self.category, base, &raw)
    }
}

enum ArrowSide {
    Matching,
    Latching,
}

/// The matching category at `alpha`: objects are the non-identity inverse
/// morphisms out of `alpha`, morphisms from ν to ν' are the inverse
/// morphisms τ with τ ∘ ν = ν'.
pub fn matching_category(r: &ReedyCategory, alpha: &str) -> Result<LabeledCategory> {
    arrow_category(r, alpha, ArrowSide::Matching)
}

/// The latching category at `alpha`: objects are the non-identity direct
/// morphisms into `alpha`, morphisms from ν to ν' are the direct morphisms
/// τ with ν' ∘ τ = ν.
pub fn latching_category(r: &ReedyCategory, alpha: &str) -> Result<LabeledCategory> {
    arrow_category(r, alpha, ArrowSide::Latching)
}

fn arrow_category(r: &ReedyCategory, alpha: &str, side: ArrowSide) -> Result<LabeledCategory> {
    let base = r.base();
    let a = base.object_index(alpha).ok_or_else(|| Error::DanglingReference {
        context: "matching/latching category".into(),
        missing: alpha.into(),
    })?;

    let wanted = |m: usize| match side {
        ArrowSide::Matching => r.is_inverse(m) && base.src(m) == a,
        ArrowSide::Latching => r.is_direct(m) && base.dst(m) == a,
    };
    let objects: Vec<usize> = base.non_identity_morphisms().filter(|&m| wanted(m)).collect();
    // The object an arrow ν points at (or comes from, for latching); the
    // projection functor lands there.
    let foot = |nu: usize| match side {
        ArrowSide::Matching => base.dst(nu),
        ArrowSide::Latching => base.src(nu),
    };

    let mut raw_morphisms = Vec::new();
    let mut arrows = Vec::new();
    for (i, &nu) in objects.iter().enumerate() {
        for (j, &nu2) in objects.iter().enumerate() {
            for &tau in base.hom(foot(nu), foot(nu2)) {
                if base.is_identity(tau) {
                    continue;
                }
                let fits = match side {
                    ArrowSide::Matching => r.is_inverse(tau) && base.compose(nu, tau)? == nu2,
                    ArrowSide::Latching => r.is_direct(tau) && base.compose(tau, nu2)? == nu,
                };
                if fits {
                    let id = format!("{}[{i}>{j}]", base.morphism_id(tau));
                    raw_morphisms.push(crate::fincat::RawMorphism {
                        id: id.clone(),
                        src: base.morphism_id(nu).into(),
                        dst: base.morphism_id(nu2).into(),
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
    for (i, &nu) in objects.iter().enumerate() {
        lookup.insert(
            (i, i, base.identity_of(foot(nu))),
            identity_name(base.morphism_id(nu)),
        );
    }

    let mut compositions = Vec::new();
    for &(i, j, t1, ref id1) in &arrows {
        for &(j2, k, t2, ref id2) in &arrows {
            if j2 != j {
                continue;
            }
            let t = base.compose(t1, t2)?;
            let equals = lookup.get(&(i, k, t)).cloned().ok_or_else(|| {
                Error::PreconditionFailed {
                    detail: "matching/latching category is not closed".into(),
                }
            })?;
            compositions.push(crate::fincat::RawComposition {
                first: id1.clone(),
                then: id2.clone(),
                equals,
            });
        }
    }

    let raw = RawCategory {
        objects: objects.iter().map(|&nu| base.morphism_id(nu).to_string()).collect(),
        morphisms: raw_morphisms,
        compositions,
    };
    let category = validate_category(&raw)?;

    let mut morphism_arrows = Vec::with_capacity(category.morphism_count());
    for &nu in &objects {
        morphism_arrows.push(base.morphism_id(base.identity_of(foot(nu))).to_string());
    }
    for &(_, _, tau, _) in &arrows {
        morphism_arrows.push(base.morphism_id(tau).to_string());
    }

    Ok(LabeledCategory {
        category,
        object_arrows: objects.iter().map(|&nu| base.morphism_id(nu).to_string()).collect(),
        object_base: objects.iter().map(|&nu| base.object_id(foot(nu)).to_string()).collect(),
        morphism_arrows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{RawComposition, RawMorphism};

    fn mor(id: &str, src: &str, dst: &str) -> RawMorphism {
        RawMorphism {
            id: id.into(),
            src: src.into(),
            dst: dst.into(),
        }
    }

    fn comp(first: &str, then: &str, equals: &str) -> RawComposition {
        RawComposition {
            first: first.into(),
            then: then.into(),
            equals: equals.into(),
        }
    }

    /// Two objects of degree 0 and 1, two direct sections `i0`, `i1` of an
    /// inverse `p`, plus the two idempotents that generates.
    fn two_object_raw() -> (RawCategory, RawReedy) {
        let raw = RawCategory {
            objects: vec!["a".into(), "b".into()],
            morphisms: vec![
                mor("i0", "a", "b"),
                mor("i1", "a", "b"),
                mor("p", "b", "a"),
                mor("e00", "b", "b"),
                mor("e11", "b", "b"),
            ],
            compositions: vec![
                comp("i0", "p", "id:a"),
                comp("i1", "p", "id:a"),
                comp("p", "i0", "e00"),
                comp("p", "i1", "e11"),
                comp("i0", "e00", "i0"),
                comp("i0", "e11", "i1"),
                comp("i1", "e00", "i0"),
                comp("i1", "e11", "i1"),
                comp("e00", "p", "p"),
                comp("e11", "p", "p"),
                comp("e00", "e00", "e00"),
                comp("e00", "e11", "e11"),
                comp("e11", "e00", "e00"),
                comp("e11", "e11", "e11"),
            ],
        };
        let reedy = RawReedy {
            degrees: [("a".to_string(), 0), ("b".to_string(), 1)].into(),
            direct: ["i0".to_string(), "i1".to_string()].into(),
            inverse: ["p".to_string()].into(),
        };
        (raw, reedy)
    }

    fn two_object() -> ReedyCategory {
        let (raw, reedy) = two_object_raw();
        validate_reedy(&validate_category(&raw).unwrap(), &reedy).unwrap()
    }

    #[test]
    fn factorizations_are_cached() {
        let r = two_object();
        let b = r.base();
        let ix = |id: &str| b.morphism_index(id).unwrap();
        assert_eq!(r.factor(ix("e00")), (ix("p"), ix("i0")));
        assert_eq!(r.factor(ix("e11")), (ix("p"), ix("i1")));
        assert_eq!(r.factor(ix("p")), (ix("p"), ix("id:a")));
        assert_eq!(r.factor(ix("i0")), (ix("id:a"), ix("i0")));
        assert_eq!(r.factor(ix("id:b")), (ix("id:b"), ix("id:b")));
        assert_eq!(b.morphism_count(), 7);
    }

    #[test]
    fn degree_violations_are_rejected() {
        let (raw, mut reedy) = two_object_raw();
        let base = validate_category(&raw).unwrap();
        reedy.inverse.remove("p");
        reedy.direct.insert("p".into());
        assert!(matches!(
            validate_reedy(&base, &reedy).unwrap_err(),
            Error::DegreeViolation { morphism, .. } if morphism == "p"
        ));

        let (raw, mut reedy) = two_object_raw();
        let base = validate_category(&raw).unwrap();
        reedy.degrees.remove("b");
        assert!(matches!(
            validate_reedy(&base, &reedy).unwrap_err(),
            Error::BadElement { .. }
        ));
    }

    #[test]
    fn ambiguous_factorization_is_rejected() {
        // g factors through two different degree-0 objects.
        let raw = RawCategory {
            objects: vec!["x".into(), "u".into(), "v".into(), "y".into()],
            morphisms: vec![
                mor("eu", "x", "u"),
                mor("ev", "x", "v"),
                mor("mu", "u", "y"),
                mor("mv", "v", "y"),
                mor("g", "x", "y"),
            ],
            compositions: vec![comp("eu", "mu", "g"), comp("ev", "mv", "g")],
        };
        let base = validate_category(&raw).unwrap();
        let reedy = RawReedy {
            degrees: [
                ("x".to_string(), 1),
                ("u".to_string(), 0),
                ("v".to_string(), 0),
                ("y".to_string(), 1),
            ]
            .into(),
            direct: ["mu".to_string(), "mv".to_string()].into(),
            inverse: ["eu".to_string(), "ev".to_string()].into(),
        };
        assert!(matches!(
            validate_reedy(&base, &reedy).unwrap_err(),
            Error::FactorizationAmbiguous { morphism, .. } if morphism == "g"
        ));
    }

    #[test]
    fn closure_violation_is_rejected() {
        // A square with the composite left unclassified.
        let raw = RawCategory {
            objects: vec!["x".into(), "y".into(), "z".into()],
            morphisms: vec![
                mor("f", "x", "y"),
                mor("g", "y", "z"),
                mor("gf", "x", "z"),
            ],
            compositions: vec![comp("f", "g", "gf")],
        };
        let base = validate_category(&raw).unwrap();
        let reedy = RawReedy {
            degrees: [
                ("x".to_string(), 2),
                ("y".to_string(), 1),
                ("z".to_string(), 0),
            ]
            .into(),
            direct: BTreeSet::new(),
            inverse: ["f".to_string(), "g".to_string()].into(),
        };
        assert!(matches!(
            validate_reedy(&base, &reedy).unwrap_err(),
            Error::NotClosed { composite, .. } if composite == "gf"
        ));
    }

    #[test]
    fn truncation_keeps_low_degrees() {
        let r = two_object();
        let (t, inclusion) = truncate(&r, 0).unwrap();
        assert_eq!(t.base().object_count(), 1);
        assert_eq!(t.base().morphism_count(), 1);
        assert_eq!(inclusion.target().object_count(), 2);

        let (all, _) = truncate(&r, 1).unwrap();
        assert_eq!(all, r);
    }

    #[test]
    fn opposite_swaps_classes_and_factorization() {
        let r = two_object();
        let op = r.opposite();
        let b = op.base();
        let ix = |id: &str| b.morphism_index(id).unwrap();
        assert!(op.is_direct(ix("p")));
        assert!(op.is_inverse(ix("i0")));
        // e00 = i0 ∘ p in the original reads e00 = p ∘ i0 in the opposite,
        // so the inverse part is now i0 and the direct part p.
        assert_eq!(op.factor(ix("e00")), (ix("i0"), ix("p")));
        assert_eq!(op.opposite(), r);
    }

    #[test]
    fn product_degrees_and_classes() {
        let r = two_object();
        let (p, _) = product_reedy_many(&[&r, &r]).unwrap();
        let b = p.base();
        assert_eq!(b.object_count(), 4);
        assert_eq!(b.morphism_count(), 49);
        assert_eq!(p.degree(b.object_index("b×b").unwrap()), 2);
        let ix = |id: &str| b.morphism_index(id).unwrap();
        assert!(p.is_direct(ix("i0×i1")));
        assert!(p.is_direct(ix("i0×id:a")));
        assert!(p.is_inverse(ix("p×p")));
        assert!(p.is_inverse(ix("p×id:a")));
        assert_eq!(p.class(ix("i0×p")), MorphismClass::General);
        assert_eq!(p.class(ix("e00×e00")), MorphismClass::General);
    }

    /// The commuting square with all arrows inverse.
    fn inverse_square() -> ReedyCategory {
        let raw = RawCategory {
            objects: vec!["alpha".into(), "gamma".into(), "delta".into(), "beta".into()],
            morphisms: vec![
                mor("p", "alpha", "gamma"),
                mor("q", "gamma", "beta"),
                mor("r", "alpha", "delta"),
                mor("s", "delta", "beta"),
                mor("qp", "alpha", "beta"),
            ],
            compositions: vec![comp("p", "q", "qp"), comp("r", "s", "qp")],
        };
        let base = validate_category(&raw).unwrap();
        let reedy = RawReedy {
            degrees: [
                ("alpha".to_string(), 2),
                ("gamma".to_string(), 1),
                ("delta".to_string(), 1),
                ("beta".to_string(), 0),
            ]
            .into(),
            direct: BTreeSet::new(),
            inverse: ["p", "q", "r", "s", "qp"].iter().map(|s| s.to_string()).collect(),
        };
        validate_reedy(&base, &reedy).unwrap()
    }

    #[test]
    fn matching_category_of_the_square() {
        let r = inverse_square();
        let m = matching_category(&r, "alpha").unwrap();
        assert_eq!(m.category.object_count(), 3);
        assert_eq!(m.object_arrows, vec!["p", "r", "qp"]);
        // q: p -> qp and s: r -> qp.
        assert_eq!(m.category.morphism_count(), 3 + 2);
        let proj = m.projection(r.base()).unwrap();
        assert_eq!(proj.target().object_count(), 4);

        let l = latching_category(&r, "alpha").unwrap();
        assert_eq!(l.category.object_count(), 0);

        // In the opposite, matching at alpha becomes latching.
        let lop = latching_category(&r.opposite(), "alpha").unwrap();
        assert_eq!(lop.category.object_count(), 3);
        assert_eq!(lop.category.morphism_count(), 5);
    }

    #[test]
    fn inverse_subcategory_of_mixed_category() {
        let r = two_object();
        let inv = r.inverse_subcategory();
        assert_eq!(inv.morphism_count(), 3); // two identities and p
        let dir = r.direct_subcategory();
        assert_eq!(dir.morphism_count(), 4); // two identities, i0, i1
    }
}
