//! Index-level analysis of the factorization categories at an anchor.
//!
//! For a Reedy functor G and objects alpha (source) and beta (target), the
//! labeled sum S collects every pair (ν, μ) of a matching-category object
//! ν: alpha -> gamma with an inverse-or-identity map μ: Gγ -> beta. The
//! quotient T identifies pairs linked by matching-category morphisms, and
//! each class carries a well-defined index μ ∘ Gν: Gα -> beta. The fibers
//! of that index function are exactly the connected components of the
//! corresponding factorization categories, so G is fibering precisely when
//! every index function is injective; a failure of injectivity is reported
//! as a concrete two-class witness.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::pi0;
use crate::quillen::{fact_object_name, inverse_factorizations, ReedyFunctor};
use crate::reedy::{matching_category, LabeledCategory};
use crate::setdiag::{colimit, validate_diagram, ColimitSet, RawDiagram, SetFunction};
use crate::union_find::UnionFind;

/// One element of the labeled sum: a matching-category object `nu` together
/// with an inverse-or-identity map `mu` out of the image of its foot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexElement {
    pub nu: String,
    pub mu: String,
}

/// The labeled sum S at an anchor, in enumeration order: matching-category
/// objects first, hom-set order within each.
#[derive(Debug, Clone)]
pub struct IndexSet {
    pub alpha: String,
    pub beta: String,
    pub elements: Vec<IndexElement>,
    /// Per element: (matching-category object, target morphism index of mu).
    pairs: Vec<(usize, usize)>,
    matching: LabeledCategory,
}

impl IndexSet {
    pub fn matching(&self) -> &LabeledCategory {
        &self.matching
    }

    pub fn label(&self, e: usize) -> String {
        fact_object_name(&self.elements[e].nu, &self.elements[e].mu)
    }
}

fn checked_objects(g: &ReedyFunctor, alpha: &str, beta: &str) -> Result<(usize, usize)> {
    let a = g
        .source()
        .base()
        .object_index(alpha)
        .ok_or_else(|| Error::DanglingReference {
            context: "index anchor object".into(),
            missing: alpha.into(),
        })?;
    let b = g
        .target()
        .base()
        .object_index(beta)
        .ok_or_else(|| Error::DanglingReference {
            context: "index anchor target".into(),
            missing: beta.into(),
        })?;
    Ok((a, b))
}

/// Build the labeled sum S at `(alpha, beta)`.
pub fn build_s(g: &ReedyFunctor, alpha: &str, beta: &str) -> Result<IndexSet> {
    let (_, b) = checked_objects(g, alpha, beta)?;
    let source = g.source();
    let target = g.target();
    let matching = matching_category(source, alpha)?;

    let mut elements = Vec::new();
    let mut pairs = Vec::new();
    for i in 0..matching.category.object_count() {
        let foot = source
            .base()
            .object_index(&matching.object_base[i])
            .expect("matching category feet are objects of the source");
        let gfoot = g.object_image(foot);
        for &m in target.base().hom(gfoot, b) {
            if !target.is_inverse_or_id(m) {
                continue;
            }
            elements.push(IndexElement {
                nu: matching.object_arrows[i].clone(),
                mu: target.base().morphism_id(m).into(),
            });
            pairs.push((i, m));
        }
    }
    Ok(IndexSet {
        alpha: alpha.into(),
        beta: beta.into(),
        elements,
        pairs,
        matching,
    })
}

/// The partition of S underlying T: classes are listed by least member, and
/// members in enumeration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TPartition {
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
}

/// Collapse S by the relation generated by the matching-category morphisms:
/// a morphism τ: ν -> ν' identifies (ν, μ' ∘ Gτ) with (ν', μ').
pub fn collapse_t(g: &ReedyFunctor, s: &IndexSet) -> Result<TPartition> {
    let source = g.source();
    let target = g.target();
    let mat = &s.matching;

    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    for (e, &pair) in s.pairs.iter().enumerate() {
        index.insert(pair, e);
    }
    let mut by_object: Vec<Vec<usize>> = vec![Vec::new(); mat.category.object_count()];
    for (e, &(i, _)) in s.pairs.iter().enumerate() {
        by_object[i].push(e);
    }

    let mut uf = UnionFind::new(s.elements.len());
    for k in mat.category.non_identity_morphisms() {
        let i = mat.category.src(k);
        let j = mat.category.dst(k);
        let tau = source
            .base()
            .morphism_index(&mat.morphism_arrows[k])
            .expect("matching-category morphisms live in the source");
        let gtau = g.morphism_image(tau);
        for &e in &by_object[j] {
            let mu2 = s.pairs[e].1;
            let mu = target.base().compose(gtau, mu2)?;
            let partner = *index.get(&(i, mu)).ok_or_else(|| Error::PreconditionFailed {
                detail: format!(
                    "transported element ({}, {}) is missing from the labeled sum",
                    mat.object_arrows[i],
                    target.base().morphism_id(mu)
                ),
            })?;
            uf.union(e, partner);
        }
    }

    let mut class_of = vec![usize::MAX; s.elements.len()];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut root_class: HashMap<usize, usize> = HashMap::new();
    for e in 0..s.elements.len() {
        let root = uf.find(e);
        let c = *root_class.entry(root).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[c].push(e);
        class_of[e] = c;
    }
    Ok(TPartition { classes, class_of })
}

/// The index function u: T -> Hom_inverse(Gα, beta) with its fibers.
#[derive(Debug, Clone, Serialize)]
pub struct IndexMapReport {
    pub map: SetFunction,
    pub injective: bool,
    /// Per codomain entry: the classes of T sitting over it.
    pub fibers: Vec<Vec<usize>>,
}

/// Send each class of T to the common composite μ ∘ Gν of its members.
pub fn index_map(g: &ReedyFunctor, s: &IndexSet, t: &TPartition) -> Result<IndexMapReport> {
    let (a, b) = checked_objects(g, &s.alpha, &s.beta)?;
    let source = g.source();
    let target = g.target();
    let ga = g.object_image(a);

    let codomain_ixs: Vec<usize> = target
        .base()
        .hom(ga, b)
        .iter()
        .copied()
        .filter(|&m| target.is_inverse_or_id(m))
        .collect();
    let codomain: Vec<String> = codomain_ixs
        .iter()
        .map(|&m| target.base().morphism_id(m).to_string())
        .collect();

    let composite = |e: usize| -> Result<usize> {
        let (i, m) = s.pairs[e];
        let nu = source
            .base()
            .morphism_index(&s.matching.object_arrows[i])
            .expect("matching-category objects live in the source");
        target.base().compose(g.morphism_image(nu), m)
    };

    let mut domain = Vec::with_capacity(t.classes.len());
    let mut map = Vec::with_capacity(t.classes.len());
    for class in &t.classes {
        let sigma = composite(class[0])?;
        for &e in &class[1..] {
            if composite(e)? != sigma {
                return Err(Error::PreconditionFailed {
                    detail: format!(
                        "class of {} has inconsistent indices",
                        s.label(class[0])
                    ),
                });
            }
        }
        let pos = codomain_ixs
            .iter()
            .position(|&m| m == sigma)
            .ok_or_else(|| Error::PreconditionFailed {
                detail: format!(
                    "index {} of class {} is not inverse or an identity",
                    target.base().morphism_id(sigma),
                    s.label(class[0])
                ),
            })?;
        domain.push(s.label(class[0]));
        map.push(pos as u32);
    }

    let function = SetFunction {
        domain,
        codomain,
        map,
    };
    let mut fibers = vec![Vec::new(); function.codomain.len()];
    for (t_ix, &pos) in function.map.iter().enumerate() {
        fibers[pos as usize].push(t_ix);
    }
    Ok(IndexMapReport {
        injective: function.is_injective(),
        map: function,
        fibers,
    })
}

/// Per-anchor correspondence between T classes and factorization-category
/// components.
#[derive(Debug, Clone, Serialize)]
pub struct SigmaComponent {
    pub sigma: String,
    pub components: usize,
    /// The T classes matched to this anchor's components, in component order.
    pub classes: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchProdReport {
    pub alpha: String,
    pub beta: String,
    pub t_classes: usize,
    pub per_sigma: Vec<SigmaComponent>,
    pub holds: bool,
}

/// Verify that T decomposes, class by class, as the disjoint union over all
/// anchors σ: Gα -> beta of the component sets of the factorization
/// categories at σ.
pub fn match_prod_check(g: &ReedyFunctor, alpha: &str, beta: &str) -> Result<MatchProdReport> {
    let s = build_s(g, alpha, beta)?;
    let t = collapse_t(g, &s)?;
    let u = index_map(g, &s, &t)?;

    let mut element_of: HashMap<(String, String), usize> = HashMap::new();
    for (e, el) in s.elements.iter().enumerate() {
        element_of.insert((el.nu.clone(), el.mu.clone()), e);
    }

    let mut holds = true;
    let mut covered = vec![false; t.classes.len()];
    let mut per_sigma = Vec::new();
    for (pos, sigma) in u.map.codomain.iter().enumerate() {
        let fc = inverse_factorizations(g, alpha, sigma)?;
        let components = pi0(&fc.category);
        let mut classes = Vec::new();
        for comp in &components.components {
            let mut members: Vec<usize> = comp
                .iter()
                .map(|&ix| {
                    let fo = &fc.objects[ix];
                    element_of[&(fo.nu.clone(), fo.mu.clone())]
                })
                .collect();
            members.sort_unstable();
            let class_ix = t.class_of[members[0]];
            if t.classes[class_ix] != members || u.map.map[class_ix] as usize != pos {
                holds = false;
            } else if std::mem::replace(&mut covered[class_ix], true) {
                holds = false;
            }
            classes.push(class_ix);
        }
        per_sigma.push(SigmaComponent {
            sigma: sigma.clone(),
            components: components.components.len(),
            classes,
        });
    }
    if covered.iter().any(|&c| !c) {
        holds = false;
    }
    Ok(MatchProdReport {
        alpha: alpha.into(),
        beta: beta.into(),
        t_classes: t.classes.len(),
        per_sigma,
        holds,
    })
}

/// Everything the index analysis produces at one anchor pair.
#[derive(Debug, Clone, Serialize)]
pub struct IndexReport {
    pub alpha: String,
    pub beta: String,
    pub elements: Vec<IndexElement>,
    pub classes: Vec<Vec<usize>>,
    pub class_names: Vec<String>,
    pub map: SetFunction,
    pub injective: bool,
    pub fibers: Vec<Vec<usize>>,
    pub per_sigma: Vec<SigmaComponent>,
    pub matching_product_holds: bool,
}

pub fn index_report(g: &ReedyFunctor, alpha: &str, beta: &str) -> Result<IndexReport> {
    let s = build_s(g, alpha, beta)?;
    let t = collapse_t(g, &s)?;
    let u = index_map(g, &s, &t)?;
    let prod = match_prod_check(g, alpha, beta)?;
    Ok(IndexReport {
        alpha: alpha.into(),
        beta: beta.into(),
        elements: s.elements.clone(),
        class_names: u.map.domain.clone(),
        classes: t.classes,
        map: u.map,
        injective: u.injective,
        fibers: u.fibers,
        per_sigma: prod.per_sigma,
        matching_product_holds: prod.holds,
    })
}

/// Compute T a second way: as the colimit, over the opposite of the
/// matching category, of the hom sets Hom_inverse(G(-), beta). The classes
/// must biject with those of `collapse_t`.
pub fn collapse_t_via_colimit(g: &ReedyFunctor, alpha: &str, beta: &str) -> Result<ColimitSet> {
    let s = build_s(g, alpha, beta)?;
    let target = g.target();
    let mat = &s.matching;
    let shape = mat.category.opposite();

    let mut raw = RawDiagram::default();
    for o in 0..shape.object_count() {
        raw.sets.insert(shape.object_id(o).to_string(), Vec::new());
    }
    for (e, &(i, _)) in s.pairs.iter().enumerate() {
        raw.sets
            .get_mut(mat.category.object_id(i))
            .expect("object ids agree with the opposite")
            .push(s.elements[e].mu.clone());
    }
    for mo in shape.non_identity_morphisms() {
        let id = shape.morphism_id(mo);
        let k = mat
            .category
            .morphism_index(id)
            .expect("opposite keeps morphism ids");
        let j = mat.category.dst(k);
        let tau = g
            .source()
            .base()
            .morphism_index(&mat.morphism_arrows[k])
            .expect("matching-category morphisms live in the source");
        let gtau = g.morphism_image(tau);
        let mut entries = std::collections::BTreeMap::new();
        for &(_, mu2) in s.pairs.iter().filter(|&&(obj, _)| obj == j) {
            let mu = target.base().compose(gtau, mu2)?;
            entries.insert(
                target.base().morphism_id(mu2).to_string(),
                target.base().morphism_id(mu).to_string(),
            );
        }
        raw.functions.insert(id.to_string(), entries);
    }
    let diagram = validate_diagram(&shape, &raw)?;
    colimit(&diagram)
}

/// A concrete two-class witness against fibering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonFibrancyWitness {
    pub alpha: String,
    pub beta: String,
    pub sigma: String,
    pub first: IndexElement,
    pub second: IndexElement,
}

/// The canonical first anchor where the index function fails injectivity,
/// with representatives of two distinct classes over it. Absent exactly
/// when the functor is fibering.
pub fn nonfibrancy_witness(g: &ReedyFunctor) -> Result<Option<NonFibrancyWitness>> {
    let source = g.source();
    let target = g.target();
    let mut candidates: Vec<(u32, NonFibrancyWitness)> = Vec::new();
    for a in 0..source.base().object_count() {
        let alpha = source.base().object_id(a);
        for b in 0..target.base().object_count() {
            let beta = target.base().object_id(b);
            let s = build_s(g, alpha, beta)?;
            let t = collapse_t(g, &s)?;
            let u = index_map(g, &s, &t)?;
            for (pos, fiber) in u.fibers.iter().enumerate() {
                if fiber.len() < 2 {
                    continue;
                }
                candidates.push((
                    source.degree(a),
                    NonFibrancyWitness {
                        alpha: alpha.into(),
                        beta: beta.into(),
                        sigma: u.map.codomain[pos].clone(),
                        first: s.elements[t.classes[fiber[0]][0]].clone(),
                        second: s.elements[t.classes[fiber[1]][0]].clone(),
                    },
                ));
            }
        }
    }
    candidates.sort_by(|x, y| {
        (x.0, &x.1.alpha, &x.1.beta, &x.1.sigma).cmp(&(y.0, &y.1.alpha, &y.1.beta, &y.1.sigma))
    });
    Ok(candidates.into_iter().next().map(|(_, w)| w))
}
