//! Diagrams of finite sets over a finite shape category, and everything the
//! matching/latching machinery needs on top of them: limits and colimits by
//! exhaustive search, restriction along functors, pointwise Kan extensions,
//! cofinality checks, and the relative matching and latching maps.
//!
//! Element bookkeeping is positional; printable names are kept so results
//! serialize deterministically. Composite elements get JSON-array names
//! (tuples for limit elements, tagged pairs for colimit classes), which
//! keeps generated names unambiguous no matter what the input ids contain.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::{FiniteCategory, FunctorData};
use crate::quillen::{g_kernel, is_fibering, ReedyFunctor};
use crate::reedy::{latching_category, matching_category, truncate, LabeledCategory, ReedyCategory};
use crate::size;
use crate::union_find::UnionFind;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDiagram {
    pub sets: BTreeMap<String, Vec<String>>,
    pub functions: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetDiagram {
    shape: FiniteCategory,
    sets: Vec<Vec<String>>,
    /// Per morphism, by element position; identities included.
    functions: Vec<Vec<u32>>,
    elem_ix: Vec<HashMap<String, u32>>,
}

pub fn validate_diagram(shape: &FiniteCategory, raw: &RawDiagram) -> Result<SetDiagram> {
    for key in raw.sets.keys() {
        if shape.object_index(key).is_none() {
            return Err(Error::DanglingReference {
                context: "diagram sets".into(),
                missing: key.clone(),
            });
        }
    }
    for key in raw.functions.keys() {
        match shape.morphism_index(key) {
            None => {
                return Err(Error::DanglingReference {
                    context: "diagram functions".into(),
                    missing: key.clone(),
                })
            }
            Some(m) if shape.is_identity(m) => {
                return Err(Error::BadElement {
                    context: "diagram functions".into(),
                    detail: format!("identity `{key}` acts automatically"),
                })
            }
            Some(_) => {}
        }
    }

    let mut sets = Vec::with_capacity(shape.object_count());
    let mut elem_ix: Vec<HashMap<String, u32>> = Vec::with_capacity(shape.object_count());
    let mut total = 0usize;
    for o in shape.objects() {
        let elems = raw.sets.get(o).ok_or_else(|| Error::BadElement {
            context: "diagram sets".into(),
            detail: format!("object `{o}` has no set"),
        })?;
        total += elems.len();
        size::check("diagram elements", total)?;
        let mut ix = HashMap::new();
        for (i, e) in elems.iter().enumerate() {
            if ix.insert(e.clone(), i as u32).is_some() {
                return Err(Error::DuplicateId { id: format!("{o}/{e}") });
            }
        }
        sets.push(elems.clone());
        elem_ix.push(ix);
    }

    let mut functions = Vec::with_capacity(shape.morphism_count());
    for o in 0..shape.object_count() {
        functions.push((0..sets[o].len() as u32).collect());
    }
    for m in shape.non_identity_morphisms() {
        let id = shape.morphism_id(m);
        let entries = raw
            .functions
            .get(id)
            .ok_or_else(|| Error::MissingFunction { morphism: id.into() })?;
        let (src, dst) = (shape.src(m), shape.dst(m));
        let mut map = Vec::with_capacity(sets[src].len());
        for e in &sets[src] {
            let img = entries.get(e).ok_or_else(|| Error::BadElement {
                context: format!("function `{id}`"),
                detail: format!("element `{e}` is not mapped"),
            })?;
            let img_ix = elem_ix[dst].get(img).ok_or_else(|| Error::BadElement {
                context: format!("function `{id}`"),
                detail: format!("`{img}` is not an element of `{}`", shape.object_id(dst)),
            })?;
            map.push(*img_ix);
        }
        for key in entries.keys() {
            if !elem_ix[src].contains_key(key) {
                return Err(Error::BadElement {
                    context: format!("function `{id}`"),
                    detail: format!("`{key}` is not an element of `{}`", shape.object_id(src)),
                });
            }
        }
        functions.push(map);
    }

    let diagram = SetDiagram {
        shape: shape.clone(),
        sets,
        functions,
        elem_ix,
    };
    for f in shape.non_identity_morphisms() {
        for g in shape.non_identity_morphisms() {
            if shape.dst(f) != shape.src(g) {
                continue;
            }
            let h = shape.compose(f, g)?;
            for e in 0..diagram.sets[shape.src(f)].len() as u32 {
                if diagram.apply(g, diagram.apply(f, e)) != diagram.apply(h, e) {
                    return Err(Error::NotFunctorial {
                        first: shape.morphism_id(f).into(),
                        then: shape.morphism_id(g).into(),
                    });
                }
            }
        }
    }
    Ok(diagram)
}

impl SetDiagram {
    pub fn shape(&self) -> &FiniteCategory {
        &self.shape
    }

    pub fn set(&self, o: usize) -> &[String] {
        &self.sets[o]
    }

    pub fn set_len(&self, o: usize) -> usize {
        self.sets[o].len()
    }

    pub fn elem_index(&self, o: usize, id: &str) -> Option<u32> {
        self.elem_ix[o].get(id).copied()
    }

    pub fn apply(&self, m: usize, e: u32) -> u32 {
        self.functions[m][e as usize]
    }

    pub fn total_elements(&self) -> usize {
        self.sets.iter().map(|s| s.len()).sum()
    }

    pub fn to_raw(&self) -> RawDiagram {
        let mut raw = RawDiagram::default();
        for (o, elems) in self.sets.iter().enumerate() {
            raw.sets.insert(self.shape.object_id(o).into(), elems.clone());
        }
        for m in self.shape.non_identity_morphisms() {
            let (src, dst) = (self.shape.src(m), self.shape.dst(m));
            let mut entries = BTreeMap::new();
            for (e, &img) in self.functions[m].iter().enumerate() {
                entries.insert(
                    self.sets[src][e].clone(),
                    self.sets[dst][img as usize].clone(),
                );
            }
            raw.functions.insert(self.shape.morphism_id(m).into(), entries);
        }
        raw
    }
}

/// A plain function between two named finite sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetFunction {
    pub domain: Vec<String>,
    pub codomain: Vec<String>,
    pub map: Vec<u32>,
}

impl SetFunction {
    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.codomain.len()];
        self.map.iter().all(|&v| !std::mem::replace(&mut seen[v as usize], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.codomain.len()];
        for &v in &self.map {
            seen[v as usize] = true;
        }
        seen.into_iter().all(|b| b)
    }

    pub fn is_bijective(&self) -> bool {
        self.domain.len() == self.codomain.len() && self.is_injective()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (e, &v) in self.map.iter().enumerate() {
            map.insert(
                self.domain[e].clone(),
                serde_json::Value::String(self.codomain[v as usize].clone()),
            );
        }
        serde_json::json!({
            "domain": self.domain,
            "codomain": self.codomain,
            "map": map,
        })
    }
}

fn tuple_name(parts: &[&str]) -> String {
    serde_json::to_string(parts).expect("string arrays serialize")
}

fn tag_name(kind: &str, elem: &str) -> String {
    serde_json::to_string(&[kind, elem]).expect("string arrays serialize")
}

/// The limit of a diagram: all compatible tuples, one coordinate per shape
/// object, enumerated in lexicographic order of element positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitSet {
    pub elements: Vec<Vec<u32>>,
    pub names: Vec<String>,
}

pub fn limit(x: &SetDiagram) -> Result<LimitSet> {
    let shape = x.shape();
    let n = shape.object_count();
    // Constraints to check as soon as object k gets its coordinate.
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); n];
    for m in shape.non_identity_morphisms() {
        checks[shape.src(m).max(shape.dst(m))].push(m);
    }

    let mut out = LimitSet {
        elements: Vec::new(),
        names: Vec::new(),
    };
    let mut chosen: Vec<u32> = Vec::with_capacity(n);
    fn rec(
        x: &SetDiagram,
        checks: &[Vec<usize>],
        chosen: &mut Vec<u32>,
        out: &mut LimitSet,
    ) -> Result<()> {
        let k = chosen.len();
        if k == x.shape().object_count() {
            size::check("limit elements", out.elements.len() + 1)?;
            out.elements.push(chosen.clone());
            let names: Vec<&str> = chosen
                .iter()
                .enumerate()
                .map(|(o, &e)| x.set(o)[e as usize].as_str())
                .collect();
            out.names.push(tuple_name(&names));
            return Ok(());
        }
        'next: for e in 0..x.set_len(k) as u32 {
            for &m in &checks[k] {
                let (s, d) = (x.shape().src(m), x.shape().dst(m));
                let (es, ed) = (
                    if s == k { e } else { chosen[s] },
                    if d == k { e } else { chosen[d] },
                );
                if x.apply(m, es) != ed {
                    continue 'next;
                }
            }
            chosen.push(e);
            rec(x, checks, chosen, out)?;
            chosen.pop();
        }
        Ok(())
    }
    rec(x, &checks, &mut chosen, &mut out)?;
    Ok(out)
}

/// The colimit of a diagram: classes of the relation generated by gluing
/// each element to its image under every function. Class names are the
/// lexicographically least member tag, tags being `["object","element"]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColimitSet {
    pub classes: Vec<Vec<(usize, u32)>>,
    pub names: Vec<String>,
    /// Class index per `[object][element]`.
    pub class_of: Vec<Vec<usize>>,
}

pub fn colimit(x: &SetDiagram) -> Result<ColimitSet> {
    let shape = x.shape();
    let mut offset = Vec::with_capacity(shape.object_count());
    let mut total = 0usize;
    for o in 0..shape.object_count() {
        offset.push(total);
        total += x.set_len(o);
    }
    let mut uf = UnionFind::new(total);
    for m in shape.non_identity_morphisms() {
        let (s, d) = (shape.src(m), shape.dst(m));
        for e in 0..x.set_len(s) as u32 {
            uf.union(offset[s] + e as usize, offset[d] + x.apply(m, e) as usize);
        }
    }

    let tag = |o: usize, e: u32| tag_name(shape.object_id(o), &x.set(o)[e as usize]);
    let mut groups: BTreeMap<usize, Vec<(usize, u32)>> = BTreeMap::new();
    for o in 0..shape.object_count() {
        for e in 0..x.set_len(o) as u32 {
            groups
                .entry(uf.find(offset[o] + e as usize))
                .or_default()
                .push((o, e));
        }
    }
    let mut named: Vec<(String, Vec<(usize, u32)>)> = groups
        .into_values()
        .map(|members| {
            let name = members
                .iter()
                .map(|&(o, e)| tag(o, e))
                .min()
                .expect("classes are nonempty");
            (name, members)
        })
        .collect();
    named.sort_by(|a, b| a.0.cmp(&b.0));

    let mut class_of: Vec<Vec<usize>> =
        (0..shape.object_count()).map(|o| vec![0; x.set_len(o)]).collect();
    for (k, (_, members)) in named.iter().enumerate() {
        for &(o, e) in members {
            class_of[o][e as usize] = k;
        }
    }
    Ok(ColimitSet {
        names: named.iter().map(|(n, _)| n.clone()).collect(),
        classes: named.into_iter().map(|(_, m)| m).collect(),
        class_of,
    })
}

/// Restriction of a diagram on D along a functor C → D.
pub fn restrict(f: &FunctorData, x: &SetDiagram) -> Result<SetDiagram> {
    if x.shape() != f.target() {
        return Err(Error::ShapeMismatch {
            detail: "diagram does not live on the functor's target".into(),
        });
    }
    let shape = f.source();
    let mut raw = RawDiagram::default();
    for o in 0..shape.object_count() {
        raw.sets.insert(
            shape.object_id(o).into(),
            x.set(f.object_image(o)).to_vec(),
        );
    }
    for m in shape.non_identity_morphisms() {
        let img = f.morphism_image(m);
        let (src, dst) = (f.object_image(shape.src(m)), f.object_image(shape.dst(m)));
        let mut entries = BTreeMap::new();
        for e in 0..x.set_len(src) as u32 {
            entries.insert(
                x.set(src)[e as usize].clone(),
                x.set(dst)[x.apply(img, e) as usize].clone(),
            );
        }
        raw.functions.insert(shape.morphism_id(m).into(), entries);
    }
    validate_diagram(shape, &raw)
}

/// The canonical comparison from the limit over D to the limit of the
/// restriction over C: forget the coordinates outside the image.
pub fn limit_restriction_map(f: &FunctorData, x: &SetDiagram) -> Result<SetFunction> {
    let big = limit(x)?;
    let restricted = restrict(f, x)?;
    let small = limit(&restricted)?;
    let index: HashMap<&Vec<u32>, usize> =
        small.elements.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut map = Vec::with_capacity(big.elements.len());
    for t in &big.elements {
        let image: Vec<u32> = (0..f.source().object_count())
            .map(|c| t[f.object_image(c)])
            .collect();
        let ix = index.get(&image).ok_or_else(|| Error::PreconditionFailed {
            detail: "restricted tuple is not a cone".into(),
        })?;
        map.push(*ix as u32);
    }
    Ok(SetFunction {
        domain: big.names,
        codomain: small.names,
        map,
    })
}

/// The canonical comparison from the colimit of the restriction over C to
/// the colimit over D.
pub fn colimit_corestriction_map(f: &FunctorData, x: &SetDiagram) -> Result<SetFunction> {
    let restricted = restrict(f, x)?;
    let small = colimit(&restricted)?;
    let big = colimit(x)?;
    let mut map = Vec::with_capacity(small.classes.len());
    for members in &small.classes {
        let mut image = None;
        for &(c, e) in members {
            let target = big.class_of[f.object_image(c)][e as usize];
            match image {
                None => image = Some(target),
                Some(prev) if prev != target => {
                    return Err(Error::PreconditionFailed {
                        detail: "corestriction is not well defined".into(),
                    })
                }
                _ => {}
            }
        }
        map.push(image.expect("classes are nonempty") as u32);
    }
    Ok(SetFunction {
        domain: small.names,
        codomain: big.names,
        map,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CofinalReport {
    pub holds: bool,
    /// First target object whose comma category is empty or disconnected.
    pub failing: Option<String>,
    pub checked: usize,
}

/// Left cofinal: every comma category (F ↓ d) is nonempty and connected,
/// which makes `limit_restriction_map` bijective for every diagram.
pub fn is_left_cofinal(f: &FunctorData) -> Result<CofinalReport> {
    cofinal(f, true)
}

/// Right cofinal: every (d ↓ F) is nonempty and connected; dual statement
/// for colimits.
pub fn is_right_cofinal(f: &FunctorData) -> Result<CofinalReport> {
    cofinal(f, false)
}

fn cofinal(f: &FunctorData, left: bool) -> Result<CofinalReport> {
    let target = f.target();
    let mut checked = 0;
    for d in 0..target.object_count() {
        checked += 1;
        let comma = if left {
            crate::fincat::comma_over(f, target.object_id(d))?
        } else {
            crate::fincat::comma_under(f, target.object_id(d))?
        };
        if crate::fincat::pi0(&comma.category).count() != 1 {
            return Ok(CofinalReport {
                holds: false,
                failing: Some(target.object_id(d).to_string()),
                checked,
            });
        }
    }
    Ok(CofinalReport {
        holds: true,
        failing: None,
        checked,
    })
}

#[derive(Debug, Clone)]
pub struct MatchingData {
    pub category: LabeledCategory,
    pub object: LimitSet,
    /// The matching map X α → M α X.
    pub map: SetFunction,
}

/// Matching object: limit of the diagram over the matching category at α,
/// together with the canonical map from the value at α.
pub fn matching_object(r: &ReedyCategory, x: &SetDiagram, alpha: &str) -> Result<MatchingData> {
    if x.shape() != r.base() {
        return Err(Error::ShapeMismatch {
            detail: "diagram does not live on the Reedy category".into(),
        });
    }
    let category = matching_category(r, alpha)?;
    let proj = category.projection(r.base())?;
    let object = limit(&restrict(&proj, x)?)?;

    let a = r.base().object_index(alpha).unwrap();
    let index: HashMap<&Vec<u32>, usize> =
        object.elements.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut map = Vec::with_capacity(x.set_len(a));
    for e in 0..x.set_len(a) as u32 {
        let tuple: Vec<u32> = category
            .object_arrows
            .iter()
            .map(|nu| x.apply(r.base().morphism_index(nu).unwrap(), e))
            .collect();
        let ix = index.get(&tuple).ok_or_else(|| Error::PreconditionFailed {
            detail: "matching tuple is not a cone".into(),
        })?;
        map.push(*ix as u32);
    }
    Ok(MatchingData {
        map: SetFunction {
            domain: x.set(a).to_vec(),
            codomain: object.names.clone(),
            map,
        },
        category,
        object,
    })
}

#[derive(Debug, Clone)]
pub struct LatchingData {
    pub category: LabeledCategory,
    pub object: ColimitSet,
    /// The latching map L α X → X α.
    pub map: SetFunction,
}

/// Latching object: colimit of the diagram over the latching category at α,
/// together with the canonical map to the value at α.
pub fn latching_object(r: &ReedyCategory, x: &SetDiagram, alpha: &str) -> Result<LatchingData> {
    if x.shape() != r.base() {
        return Err(Error::ShapeMismatch {
            detail: "diagram does not live on the Reedy category".into(),
        });
    }
    let category = latching_category(r, alpha)?;
    let proj = category.projection(r.base())?;
    let object = colimit(&restrict(&proj, x)?)?;

    let a = r.base().object_index(alpha).unwrap();
    let mut map = Vec::with_capacity(object.classes.len());
    for members in &object.classes {
        let mut image = None;
        for &(i, e) in members {
            let nu = r.base().morphism_index(&category.object_arrows[i]).unwrap();
            let v = x.apply(nu, e);
            match image {
                None => image = Some(v),
                Some(prev) if prev != v => {
                    return Err(Error::PreconditionFailed {
                        detail: "latching map is not well defined".into(),
                    })
                }
                _ => {}
            }
        }
        map.push(image.expect("classes are nonempty"));
    }
    Ok(LatchingData {
        map: SetFunction {
            domain: object.names.clone(),
            codomain: x.set(a).to_vec(),
            map,
        },
        category,
        object,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackSet {
    pub pairs: Vec<(u32, u32)>,
    pub names: Vec<String>,
}

/// Pairs (a, b) with f(a) = g(b), for f: A → C and g: B → C.
pub fn pullback(f: &SetFunction, g: &SetFunction) -> Result<PullbackSet> {
    if f.codomain != g.codomain {
        return Err(Error::ShapeMismatch {
            detail: "pullback legs have different codomains".into(),
        });
    }
    let mut pairs = Vec::new();
    let mut names = Vec::new();
    for a in 0..f.map.len() as u32 {
        for b in 0..g.map.len() as u32 {
            if f.map[a as usize] == g.map[b as usize] {
                pairs.push((a, b));
                names.push(tuple_name(&[
                    f.domain[a as usize].as_str(),
                    g.domain[b as usize].as_str(),
                ]));
            }
        }
    }
    Ok(PullbackSet { pairs, names })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushoutSet {
    /// Classes of B ⊔ C; `(false, i)` is an element of B, `(true, j)` of C.
    pub classes: Vec<Vec<(bool, u32)>>,
    pub names: Vec<String>,
    pub left_class: Vec<usize>,
    pub right_class: Vec<usize>,
}

/// Quotient of B ⊔ C by f(a) ~ g(a), for f: A → B and g: A → C.
pub fn pushout(f: &SetFunction, g: &SetFunction) -> Result<PushoutSet> {
    if f.domain != g.domain {
        return Err(Error::ShapeMismatch {
            detail: "pushout legs have different domains".into(),
        });
    }
    let nb = f.codomain.len();
    let nc = g.codomain.len();
    let mut uf = UnionFind::new(nb + nc);
    for a in 0..f.map.len() {
        uf.union(f.map[a] as usize, nb + g.map[a] as usize);
    }
    let tag = |node: usize| {
        if node < nb {
            tag_name("l", &f.codomain[node])
        } else {
            tag_name("r", &g.codomain[node - nb])
        }
    };
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for node in 0..nb + nc {
        groups.entry(uf.find(node)).or_default().push(node);
    }
    let mut named: Vec<(String, Vec<usize>)> = groups
        .into_values()
        .map(|members| {
            let name = members.iter().map(|&n| tag(n)).min().expect("nonempty");
            (name, members)
        })
        .collect();
    named.sort_by(|a, b| a.0.cmp(&b.0));

    let mut left_class = vec![0; nb];
    let mut right_class = vec![0; nc];
    for (k, (_, members)) in named.iter().enumerate() {
        for &node in members {
            if node < nb {
                left_class[node] = k;
            } else {
                right_class[node - nb] = k;
            }
        }
    }
    Ok(PushoutSet {
        names: named.iter().map(|(n, _)| n.clone()).collect(),
        classes: named
            .into_iter()
            .map(|(_, members)| {
                members
                    .into_iter()
                    .map(|n| if n < nb { (false, n as u32) } else { (true, (n - nb) as u32) })
                    .collect()
            })
            .collect(),
        left_class,
        right_class,
    })
}

/// A natural transformation between two diagrams on the same shape,
/// stored by element position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatTrans {
    pub components: Vec<Vec<u32>>,
}

pub type RawNatTrans = BTreeMap<String, BTreeMap<String, String>>;

pub fn validate_nat(x: &SetDiagram, y: &SetDiagram, raw: &RawNatTrans) -> Result<NatTrans> {
    if x.shape() != y.shape() {
        return Err(Error::ShapeMismatch {
            detail: "natural transformation between diagrams on different shapes".into(),
        });
    }
    let shape = x.shape();
    for key in raw.keys() {
        if shape.object_index(key).is_none() {
            return Err(Error::DanglingReference {
                context: "natural transformation".into(),
                missing: key.clone(),
            });
        }
    }
    let mut components = Vec::with_capacity(shape.object_count());
    for o in 0..shape.object_count() {
        let oid = shape.object_id(o);
        let entries = raw.get(oid).ok_or_else(|| Error::BadElement {
            context: "natural transformation".into(),
            detail: format!("no component at `{oid}`"),
        })?;
        let mut comp = Vec::with_capacity(x.set_len(o));
        for e in x.set(o) {
            let img = entries.get(e).ok_or_else(|| Error::BadElement {
                context: format!("component at `{oid}`"),
                detail: format!("element `{e}` is not mapped"),
            })?;
            let ix = y.elem_index(o, img).ok_or_else(|| Error::BadElement {
                context: format!("component at `{oid}`"),
                detail: format!("`{img}` is not an element of the codomain"),
            })?;
            comp.push(ix);
        }
        components.push(comp);
    }
    let t = NatTrans { components };
    check_naturality(x, y, &t)?;
    Ok(t)
}

fn check_naturality(x: &SetDiagram, y: &SetDiagram, t: &NatTrans) -> Result<()> {
    let shape = x.shape();
    for m in shape.non_identity_morphisms() {
        let (s, d) = (shape.src(m), shape.dst(m));
        for e in 0..x.set_len(s) as u32 {
            if y.apply(m, t.components[s][e as usize]) != t.components[d][x.apply(m, e) as usize] {
                return Err(Error::NotNatural {
                    morphism: shape.morphism_id(m).into(),
                });
            }
        }
    }
    Ok(())
}

/// Every natural transformation from x to y, by backtracking over the
/// components in object order. Errs with `SizeLimit` when more than `cap`
/// exist.
pub fn natural_transformations(
    x: &SetDiagram,
    y: &SetDiagram,
    cap: usize,
) -> Result<Vec<NatTrans>> {
    if x.shape() != y.shape() {
        return Err(Error::ShapeMismatch {
            detail: "natural transformation between diagrams on different shapes".into(),
        });
    }
    let shape = x.shape();
    let n = shape.object_count();
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); n];
    for m in shape.non_identity_morphisms() {
        checks[shape.src(m).max(shape.dst(m))].push(m);
    }

    fn natural_here(
        x: &SetDiagram,
        y: &SetDiagram,
        parts: &[Vec<u32>],
        checks: &[usize],
    ) -> bool {
        let shape = x.shape();
        checks.iter().all(|&m| {
            let (s, d) = (shape.src(m), shape.dst(m));
            (0..x.set_len(s) as u32).all(|e| {
                y.apply(m, parts[s][e as usize]) == parts[d][x.apply(m, e) as usize]
            })
        })
    }

    fn rec(
        x: &SetDiagram,
        y: &SetDiagram,
        checks: &[Vec<usize>],
        parts: &mut Vec<Vec<u32>>,
        out: &mut Vec<NatTrans>,
        cap: usize,
    ) -> Result<()> {
        let k = parts.len();
        if k == x.shape().object_count() {
            if out.len() >= cap {
                return Err(Error::SizeLimit {
                    what: "natural transformations".into(),
                    requested: out.len() + 1,
                    limit: cap,
                });
            }
            out.push(NatTrans {
                components: parts.clone(),
            });
            return Ok(());
        }
        let dom = x.set_len(k);
        let cod = y.set_len(k);
        if dom > 0 && cod == 0 {
            return Ok(());
        }
        let mut comp = vec![0u32; dom];
        loop {
            parts.push(comp.clone());
            if natural_here(x, y, parts, &checks[k]) {
                rec(x, y, checks, parts, out, cap)?;
            }
            parts.pop();
            // Advance the mixed-radix counter.
            let mut i = 0;
            loop {
                if i == dom {
                    return Ok(());
                }
                comp[i] += 1;
                if (comp[i] as usize) < cod {
                    break;
                }
                comp[i] = 0;
                i += 1;
            }
        }
    }

    let mut out = Vec::new();
    let mut parts = Vec::new();
    rec(x, y, &checks, &mut parts, &mut out, cap)?;
    Ok(out)
}

/// The relative matching map at α: X α → Y α ×_{M α Y} M α X, for a natural
/// transformation t: X → Y.
pub fn relative_matching_map(
    r: &ReedyCategory,
    x: &SetDiagram,
    y: &SetDiagram,
    t: &NatTrans,
    alpha: &str,
) -> Result<SetFunction> {
    check_naturality(x, y, t)?;
    let mx = matching_object(r, x, alpha)?;
    let my = matching_object(r, y, alpha)?;
    let a = r.base().object_index(alpha).ok_or_else(|| Error::DanglingReference {
        context: "relative matching map".into(),
        missing: alpha.into(),
    })?;

    // M α t: map a compatible tuple componentwise.
    let feet: Vec<usize> = (0..mx.category.category.object_count())
        .map(|i| r.base().object_index(&mx.category.object_base[i]).unwrap())
        .collect();
    let my_index: HashMap<&Vec<u32>, usize> =
        my.object.elements.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut mt = Vec::with_capacity(mx.object.elements.len());
    for tuple in &mx.object.elements {
        let image: Vec<u32> = tuple
            .iter()
            .zip(&feet)
            .map(|(&e, &foot)| t.components[foot][e as usize])
            .collect();
        let ix = my_index.get(&image).ok_or_else(|| Error::PreconditionFailed {
            detail: "image of a matching tuple is not a cone".into(),
        })?;
        mt.push(*ix as u32);
    }
    let mt = SetFunction {
        domain: mx.object.names.clone(),
        codomain: my.object.names.clone(),
        map: mt,
    };

    let pb = pullback(&my.map, &mt)?;
    let pair_index: HashMap<(u32, u32), usize> =
        pb.pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut map = Vec::with_capacity(x.set_len(a));
    for e in 0..x.set_len(a) as u32 {
        let pair = (t.components[a][e as usize], mx.map.map[e as usize]);
        let ix = pair_index.get(&pair).ok_or_else(|| Error::PreconditionFailed {
            detail: "relative matching image misses the pullback".into(),
        })?;
        map.push(*ix as u32);
    }
    Ok(SetFunction {
        domain: x.set(a).to_vec(),
        codomain: pb.names,
        map,
    })
}

/// The relative latching map at α: X α ⊔_{L α X} L α Y → Y α.
pub fn relative_latching_map(
    r: &ReedyCategory,
    x: &SetDiagram,
    y: &SetDiagram,
    t: &NatTrans,
    alpha: &str,
) -> Result<SetFunction> {
    check_naturality(x, y, t)?;
    let lx = latching_object(r, x, alpha)?;
    let ly = latching_object(r, y, alpha)?;
    let a = r.base().object_index(alpha).ok_or_else(|| Error::DanglingReference {
        context: "relative latching map".into(),
        missing: alpha.into(),
    })?;

    // L α t: push each class member through t and look its class up.
    let mut lt = Vec::with_capacity(lx.object.classes.len());
    for members in &lx.object.classes {
        let mut image = None;
        for &(i, e) in members {
            let foot = r
                .base()
                .object_index(&lx.category.object_base[i])
                .unwrap();
            let target = ly.object.class_of[i][t.components[foot][e as usize] as usize];
            match image {
                None => image = Some(target),
                Some(prev) if prev != target => {
                    return Err(Error::PreconditionFailed {
                        detail: "latching transformation is not well defined".into(),
                    })
                }
                _ => {}
            }
        }
        lt.push(image.expect("classes are nonempty") as u32);
    }
    let lt = SetFunction {
        domain: lx.object.names.clone(),
        codomain: ly.object.names.clone(),
        map: lt,
    };

    let po = pushout(&lx.map, &lt)?;
    // Value of each pushout class in Y α.
    let mut map = Vec::with_capacity(po.classes.len());
    for members in &po.classes {
        let mut image = None;
        for &(is_right, e) in members {
            let v = if is_right {
                ly.map.map[e as usize]
            } else {
                t.components[a][e as usize]
            };
            match image {
                None => image = Some(v),
                Some(prev) if prev != v => {
                    return Err(Error::PreconditionFailed {
                        detail: "relative latching map is not well defined".into(),
                    })
                }
                _ => {}
            }
        }
        map.push(image.expect("classes are nonempty"));
    }
    Ok(SetFunction {
        domain: po.names,
        codomain: y.set(a).to_vec(),
        map,
    })
}

/// Pointwise left Kan extension along f: C → D of a diagram on C. The value
/// at d is the colimit over (f ↓ d).
pub fn left_kan(f: &FunctorData, x: &SetDiagram) -> Result<SetDiagram> {
    if x.shape() != f.source() {
        return Err(Error::ShapeMismatch {
            detail: "diagram does not live on the functor's source".into(),
        });
    }
    let d = f.target();
    let mut commas = Vec::with_capacity(d.object_count());
    let mut colimits = Vec::with_capacity(d.object_count());
    let mut raw = RawDiagram::default();
    for o in 0..d.object_count() {
        let comma = crate::fincat::comma_over(f, d.object_id(o))?;
        let proj = comma.projection(f.source())?;
        let co = colimit(&restrict(&proj, x)?)?;
        raw.sets.insert(d.object_id(o).into(), co.names.clone());
        commas.push(comma);
        colimits.push(co);
    }
    for m in d.non_identity_morphisms() {
        let (s, t) = (d.src(m), d.dst(m));
        let mut entries = BTreeMap::new();
        for (k, members) in colimits[s].classes.iter().enumerate() {
            let mut image = None;
            for &(i, e) in members {
                // (c, arrow) becomes (c, m ∘ arrow) in the target comma.
                let c = &commas[s].objects[i];
                let arrow = d.morphism_index(&c.arrow).unwrap();
                let moved = d.compose(arrow, m)?;
                let j = commas[t]
                    .object_index_of(&c.object, d.morphism_id(moved))
                    .ok_or_else(|| Error::PreconditionFailed {
                        detail: "comma object lost under post-composition".into(),
                    })?;
                let target = colimits[t].class_of[j][e as usize];
                match image {
                    None => image = Some(target),
                    Some(prev) if prev != target => {
                        return Err(Error::PreconditionFailed {
                            detail: "left Kan action is not well defined".into(),
                        })
                    }
                    _ => {}
                }
            }
            entries.insert(
                colimits[s].names[k].clone(),
                colimits[t].names[image.expect("nonempty")].clone(),
            );
        }
        raw.functions.insert(d.morphism_id(m).into(), entries);
    }
    validate_diagram(d, &raw)
}

/// Pointwise right Kan extension along f: C → D. The value at d is the
/// limit over (d ↓ f).
pub fn right_kan(f: &FunctorData, x: &SetDiagram) -> Result<SetDiagram> {
    if x.shape() != f.source() {
        return Err(Error::ShapeMismatch {
            detail: "diagram does not live on the functor's source".into(),
        });
    }
    let d = f.target();
    let mut commas = Vec::with_capacity(d.object_count());
    let mut limits = Vec::with_capacity(d.object_count());
    let mut raw = RawDiagram::default();
    for o in 0..d.object_count() {
        let comma = crate::fincat::comma_under(f, d.object_id(o))?;
        let proj = comma.projection(f.source())?;
        let li = limit(&restrict(&proj, x)?)?;
        raw.sets.insert(d.object_id(o).into(), li.names.clone());
        commas.push(comma);
        limits.push(li);
    }
    for m in d.non_identity_morphisms() {
        let (s, t) = (d.src(m), d.dst(m));
        let index: HashMap<&Vec<u32>, usize> = limits[t]
            .elements
            .iter()
            .enumerate()
            .map(|(i, t)| (t, i))
            .collect();
        let mut entries = BTreeMap::new();
        for (k, tuple) in limits[s].elements.iter().enumerate() {
            // Component of the image at (c, g: t → F c) is the component
            // at (c, g ∘ m).
            let mut image = Vec::with_capacity(commas[t].objects.len());
            for c in &commas[t].objects {
                let arrow = d.morphism_index(&c.arrow).unwrap();
                let pulled = d.compose(m, arrow)?;
                let i = commas[s]
                    .object_index_of(&c.object, d.morphism_id(pulled))
                    .ok_or_else(|| Error::PreconditionFailed {
                        detail: "comma object lost under pre-composition".into(),
                    })?;
                image.push(tuple[i]);
            }
            let ix = index.get(&image).ok_or_else(|| Error::PreconditionFailed {
                detail: "right Kan action misses the limit".into(),
            })?;
            entries.insert(
                limits[s].names[k].clone(),
                limits[t].names[*ix].clone(),
            );
        }
        raw.functions.insert(d.morphism_id(m).into(), entries);
    }
    validate_diagram(d, &raw)
}

/// Left Kan extension back along the degree-n truncation inclusion.
pub fn skeleton(r: &ReedyCategory, x: &SetDiagram, n: u32) -> Result<SetDiagram> {
    let (_, inclusion) = truncate(r, n)?;
    left_kan(&inclusion, &restrict(&inclusion, x)?)
}

/// Right Kan extension back along the degree-n truncation inclusion.
pub fn coskeleton(r: &ReedyCategory, x: &SetDiagram, n: u32) -> Result<SetDiagram> {
    let (_, inclusion) = truncate(r, n)?;
    right_kan(&inclusion, &restrict(&inclusion, x)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchingIsoReport {
    pub alpha: String,
    pub value_size: usize,
    pub matching_size: usize,
    pub bijective: bool,
}

/// For a fibering G with nonempty kernel at α, the matching map of the
/// restricted diagram at α is a bijection; this checks that on a concrete
/// diagram. Errs with `PreconditionFailed` when the hypotheses do not hold.
pub fn matching_iso_check(
    g: &ReedyFunctor,
    x: &SetDiagram,
    alpha: &str,
) -> Result<MatchingIsoReport> {
    if !is_fibering(g)?.holds {
        return Err(Error::PreconditionFailed {
            detail: "functor is not fibering".into(),
        });
    }
    if g_kernel(g, alpha)?.category.object_count() == 0 {
        return Err(Error::PreconditionFailed {
            detail: format!("kernel at `{alpha}` is empty"),
        });
    }
    let restricted = restrict(g.functor(), x)?;
    let data = matching_object(g.source(), &restricted, alpha)?;
    Ok(MatchingIsoReport {
        alpha: alpha.into(),
        value_size: data.map.domain.len(),
        matching_size: data.object.names.len(),
        bijective: data.map.is_bijective(),
    })
}

/// The covariant hom diagram Hom(c, −) on the category itself.
pub fn representable(c: &FiniteCategory, object: &str) -> Result<SetDiagram> {
    let o = c.object_index(object).ok_or_else(|| Error::DanglingReference {
        context: "representable diagram".into(),
        missing: object.into(),
    })?;
    sum_of_representables_at(c, &[o])
}

/// Disjoint union of covariant hom diagrams; element `h` of the k-th summand
/// is tagged `h@k`.
pub fn sum_of_representables(c: &FiniteCategory, objects: &[&str]) -> Result<SetDiagram> {
    let mut ixs = Vec::with_capacity(objects.len());
    for &ob in objects {
        ixs.push(c.object_index(ob).ok_or_else(|| Error::DanglingReference {
            context: "representable diagram".into(),
            missing: ob.into(),
        })?);
    }
    sum_of_representables_at(c, &ixs)
}

fn sum_of_representables_at(c: &FiniteCategory, summands: &[usize]) -> Result<SetDiagram> {
    let single = summands.len() == 1;
    let tag = |m: usize, k: usize| {
        if single {
            c.morphism_id(m).to_string()
        } else {
            format!("{}@{k}", c.morphism_id(m))
        }
    };
    let mut raw = RawDiagram::default();
    for x in 0..c.object_count() {
        let mut elems = Vec::new();
        for (k, &s) in summands.iter().enumerate() {
            for &h in c.hom(s, x) {
                elems.push(tag(h, k));
            }
        }
        raw.sets.insert(c.object_id(x).into(), elems);
    }
    for m in c.non_identity_morphisms() {
        let (x, _) = (c.src(m), c.dst(m));
        let mut entries = BTreeMap::new();
        for (k, &s) in summands.iter().enumerate() {
            for &h in c.hom(s, x) {
                entries.insert(tag(h, k), tag(c.compose(h, m)?, k));
            }
        }
        raw.functions.insert(c.morphism_id(m).into(), entries);
    }
    validate_diagram(c, &raw)
}

/// Hom into β through inverse morphisms, as a diagram on the opposite of
/// the inverse subcategory: γ ↦ { inverse-or-identity h: γ → β }, acting by
/// precomposition.
pub fn inverse_hom_diagram(r: &ReedyCategory, beta: &str) -> Result<SetDiagram> {
    let inv = r.inverse_subcategory();
    let b = inv.object_index(beta).ok_or_else(|| Error::DanglingReference {
        context: "inverse hom diagram".into(),
        missing: beta.into(),
    })?;
    let shape = inv.opposite();
    let mut raw = RawDiagram::default();
    for o in 0..inv.object_count() {
        let elems: Vec<String> = inv
            .hom(o, b)
            .iter()
            .map(|&h| inv.morphism_id(h).to_string())
            .collect();
        raw.sets.insert(inv.object_id(o).into(), elems);
    }
    for m in shape.non_identity_morphisms() {
        // m: γ → γ' in the opposite is τ: γ' → γ in the inverse subcategory.
        let tau = inv.morphism_index(shape.morphism_id(m)).unwrap();
        let mut entries = BTreeMap::new();
        for &h in inv.hom(inv.dst(tau), b) {
            entries.insert(
                inv.morphism_id(h).to_string(),
                inv.morphism_id(inv.compose(tau, h)?).to_string(),
            );
        }
        raw.functions.insert(shape.morphism_id(m).into(), entries);
    }
    validate_diagram(&shape, &raw)
}
