//! Finite categories given by explicit composition tables.
//!
//! A category is validated once, up front: identity laws, associativity,
//! closure of the table, and uniqueness of identifiers. After that every
//! value is immutable and all operations are pure. Identities are never
//! listed in raw input; they are auto-generated with the reserved name
//! `id:<object>` and occupy the first `object_count` morphism slots, in
//! object order, followed by the raw morphisms in input order. That input
//! order is the canonical order used for deterministic tie-breaking
//! throughout the crate.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::size;
use crate::union_find::UnionFind;

pub const ID_PREFIX: &str = "id:";

pub fn identity_name(object: &str) -> String {
    format!("{ID_PREFIX}{object}")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawMorphism {
    pub id: String,
    pub src: String,
    pub dst: String,
}

/// One table entry: `equals = then ∘ first`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawComposition {
    pub first: String,
    pub then: String,
    pub equals: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawCategory {
    pub objects: Vec<String>,
    pub morphisms: Vec<RawMorphism>,
    pub compositions: Vec<RawComposition>,
}

#[derive(Debug, Clone)]
struct Morphism {
    id: String,
    src: usize,
    dst: usize,
}

#[derive(Debug, Clone)]
pub struct FiniteCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    /// Index of the identity morphism of each object (equals the object
    /// index, by construction; kept explicit for clarity).
    identities: Vec<usize>,
    /// `(f, g) -> g ∘ f` over pairs of non-identity morphisms.
    table: HashMap<(u32, u32), u32>,
    obj_ix: HashMap<String, usize>,
    mor_ix: HashMap<String, usize>,
    hom: HashMap<(u32, u32), Vec<usize>>,
}

impl PartialEq for FiniteCategory {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms.len() == other.morphisms.len()
            && self
                .morphisms
                .iter()
                .zip(&other.morphisms)
                .all(|(a, b)| a.id == b.id && a.src == b.src && a.dst == b.dst)
            && self.table == other.table
    }
}

impl Eq for FiniteCategory {}

pub fn validate_category(raw: &RawCategory) -> Result<FiniteCategory> {
    size::check(
        "category morphisms",
        raw.objects.len() + raw.morphisms.len(),
    )?;

    let mut obj_ix: HashMap<String, usize> = HashMap::new();
    for (i, o) in raw.objects.iter().enumerate() {
        if obj_ix.insert(o.clone(), i).is_some() {
            return Err(Error::DuplicateId { id: o.clone() });
        }
    }

    let mut morphisms: Vec<Morphism> = Vec::with_capacity(raw.objects.len() + raw.morphisms.len());
    let mut mor_ix: HashMap<String, usize> = HashMap::new();
    let mut identities = Vec::with_capacity(raw.objects.len());
    for (i, o) in raw.objects.iter().enumerate() {
        let id = identity_name(o);
        mor_ix.insert(id.clone(), i);
        morphisms.push(Morphism {
            id,
            src: i,
            dst: i,
        });
        identities.push(i);
    }
    for m in &raw.morphisms {
        let src = *obj_ix.get(&m.src).ok_or_else(|| Error::DanglingReference {
            context: format!("morphism `{}`", m.id),
            missing: m.src.clone(),
        })?;
        let dst = *obj_ix.get(&m.dst).ok_or_else(|| Error::DanglingReference {
            context: format!("morphism `{}`", m.id),
            missing: m.dst.clone(),
        })?;
        let ix = morphisms.len();
        if mor_ix.insert(m.id.clone(), ix).is_some() {
            return Err(Error::DuplicateId { id: m.id.clone() });
        }
        morphisms.push(Morphism {
            id: m.id.clone(),
            src,
            dst,
        });
    }

    let n_obj = raw.objects.len();
    let is_id = |m: usize| m < n_obj;

    let mut table: HashMap<(u32, u32), u32> = HashMap::new();
    for entry in &raw.compositions {
        let lookup = |id: &String| -> Result<usize> {
            mor_ix.get(id).copied().ok_or_else(|| Error::DanglingReference {
                context: format!("composition entry ({}, {})", entry.first, entry.then),
                missing: id.clone(),
            })
        };
        let f = lookup(&entry.first)?;
        let g = lookup(&entry.then)?;
        let h = lookup(&entry.equals)?;
        if is_id(f) || is_id(g) {
            return Err(Error::BadComposition {
                first: entry.first.clone(),
                then: entry.then.clone(),
                detail: "identity compositions are filled in automatically".into(),
            });
        }
        if morphisms[f].dst != morphisms[g].src {
            return Err(Error::NotComposable {
                first: entry.first.clone(),
                then: entry.then.clone(),
                mid1: raw.objects[morphisms[f].dst].clone(),
                mid2: raw.objects[morphisms[g].src].clone(),
            });
        }
        if morphisms[h].src != morphisms[f].src || morphisms[h].dst != morphisms[g].dst {
            return Err(Error::BadComposition {
                first: entry.first.clone(),
                then: entry.then.clone(),
                detail: format!("result `{}` has mismatched endpoints", entry.equals),
            });
        }
        if table.insert((f as u32, g as u32), h as u32).is_some() {
            return Err(Error::BadComposition {
                first: entry.first.clone(),
                then: entry.then.clone(),
                detail: "duplicate entry".into(),
            });
        }
    }

    // Closure: every composable pair of non-identity morphisms has an entry.
    let mut by_src: Vec<Vec<usize>> = vec![Vec::new(); n_obj];
    for m in n_obj..morphisms.len() {
        by_src[morphisms[m].src].push(m);
    }
    for f in n_obj..morphisms.len() {
        for &g in &by_src[morphisms[f].dst] {
            if !table.contains_key(&(f as u32, g as u32)) {
                return Err(Error::MissingComposition {
                    first: morphisms[f].id.clone(),
                    then: morphisms[g].id.clone(),
                });
            }
        }
    }

    // Associativity over non-identity triples; pairs involving identities
    // hold by construction.
    let comp = |f: usize, g: usize| -> usize {
        if is_id(f) {
            g
        } else if is_id(g) {
            f
        } else {
            table[&(f as u32, g as u32)] as usize
        }
    };
    for f in n_obj..morphisms.len() {
        for &g in &by_src[morphisms[f].dst] {
            let fg = comp(f, g);
            for &h in &by_src[morphisms[g].dst] {
                let gh = comp(g, h);
                if comp(fg, h) != comp(f, gh) {
                    return Err(Error::BrokenAssociativity {
                        f: morphisms[f].id.clone(),
                        g: morphisms[g].id.clone(),
                        h: morphisms[h].id.clone(),
                    });
                }
            }
        }
    }

    let mut hom: HashMap<(u32, u32), Vec<usize>> = HashMap::new();
    for (m, data) in morphisms.iter().enumerate() {
        hom.entry((data.src as u32, data.dst as u32)).or_default().push(m);
    }

    Ok(FiniteCategory {
        objects: raw.objects.clone(),
        morphisms,
        identities,
        table,
        obj_ix,
        mor_ix,
        hom,
    })
}

impl FiniteCategory {
    pub fn empty() -> FiniteCategory {
        validate_category(&RawCategory::default()).expect("empty category is valid")
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_index(&self, id: &str) -> Option<usize> {
        self.obj_ix.get(id).copied()
    }

    pub fn object_id(&self, ix: usize) -> &str {
        &self.objects[ix]
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn morphism_index(&self, id: &str) -> Option<usize> {
        self.mor_ix.get(id).copied()
    }

    pub fn morphism_id(&self, m: usize) -> &str {
        &self.morphisms[m].id
    }

    pub fn src(&self, m: usize) -> usize {
        self.morphisms[m].src
    }

    pub fn dst(&self, m: usize) -> usize {
        self.morphisms[m].dst
    }

    pub fn is_identity(&self, m: usize) -> bool {
        m < self.objects.len()
    }

    pub fn identity_of(&self, o: usize) -> usize {
        self.identities[o]
    }

    pub fn non_identity_morphisms(&self) -> impl Iterator<Item = usize> + '_ {
        self.objects.len()..self.morphisms.len()
    }

    pub fn hom(&self, a: usize, b: usize) -> &[usize] {
        self.hom
            .get(&(a as u32, b as u32))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// `g ∘ f`; identities short-circuit, everything else hits the table.
    pub fn compose(&self, f: usize, g: usize) -> Result<usize> {
        if self.morphisms[f].dst != self.morphisms[g].src {
            return Err(Error::NotComposable {
                first: self.morphisms[f].id.clone(),
                then: self.morphisms[g].id.clone(),
                mid1: self.objects[self.morphisms[f].dst].clone(),
                mid2: self.objects[self.morphisms[g].src].clone(),
            });
        }
        if self.is_identity(f) {
            return Ok(g);
        }
        if self.is_identity(g) {
            return Ok(f);
        }
        self.table
            .get(&(f as u32, g as u32))
            .map(|&h| h as usize)
            .ok_or_else(|| Error::MissingComposition {
                first: self.morphisms[f].id.clone(),
                then: self.morphisms[g].id.clone(),
            })
    }

    pub fn compose_ids(&self, first: &str, then: &str) -> Result<&str> {
        let f = self.morphism_index(first).ok_or_else(|| Error::DanglingReference {
            context: "compose".into(),
            missing: first.into(),
        })?;
        let g = self.morphism_index(then).ok_or_else(|| Error::DanglingReference {
            context: "compose".into(),
            missing: then.into(),
        })?;
        Ok(self.morphism_id(self.compose(f, g)?))
    }

    pub fn to_raw(&self) -> RawCategory {
        let n_obj = self.objects.len();
        let morphisms = self.morphisms[n_obj..]
            .iter()
            .map(|m| RawMorphism {
                id: m.id.clone(),
                src: self.objects[m.src].clone(),
                dst: self.objects[m.dst].clone(),
            })
            .collect();
        let mut compositions = Vec::with_capacity(self.table.len());
        for f in n_obj..self.morphisms.len() {
            let dst = self.morphisms[f].dst;
            for g in n_obj..self.morphisms.len() {
                if self.morphisms[g].src != dst {
                    continue;
                }
                let h = self.table[&(f as u32, g as u32)] as usize;
                compositions.push(RawComposition {
                    first: self.morphisms[f].id.clone(),
                    then: self.morphisms[g].id.clone(),
                    equals: self.morphisms[h].id.clone(),
                });
            }
        }
        RawCategory {
            objects: self.objects.clone(),
            morphisms,
            compositions,
        }
    }

    pub fn opposite(&self) -> FiniteCategory {
        let raw = self.to_raw();
        let op = RawCategory {
            objects: raw.objects,
            morphisms: raw
                .morphisms
                .into_iter()
                .map(|m| RawMorphism {
                    id: m.id,
                    src: m.dst,
                    dst: m.src,
                })
                .collect(),
            compositions: raw
                .compositions
                .into_iter()
                .map(|c| RawComposition {
                    first: c.then,
                    then: c.first,
                    equals: c.equals,
                })
                .collect(),
        };
        validate_category(&op).expect("opposite of a valid category is valid")
    }

    pub fn full_subcategory(&self, keep: &[&str]) -> Result<FiniteCategory> {
        let mut kept = Vec::with_capacity(keep.len());
        let mut seen = HashMap::new();
        for &o in keep {
            let ix = self.object_index(o).ok_or_else(|| Error::DanglingReference {
                context: "full_subcategory".into(),
                missing: o.into(),
            })?;
            if seen.insert(ix, ()).is_some() {
                return Err(Error::DuplicateId { id: o.into() });
            }
            kept.push(ix);
        }
        let in_sub: Vec<bool> = {
            let mut v = vec![false; self.objects.len()];
            for &ix in &kept {
                v[ix] = true;
            }
            v
        };
        let keep_mor = |m: &Morphism| in_sub[m.src] && in_sub[m.dst];
        let raw = RawCategory {
            objects: kept.iter().map(|&ix| self.objects[ix].clone()).collect(),
            morphisms: self.morphisms[self.objects.len()..]
                .iter()
                .filter(|m| keep_mor(m))
                .map(|m| RawMorphism {
                    id: m.id.clone(),
                    src: self.objects[m.src].clone(),
                    dst: self.objects[m.dst].clone(),
                })
                .collect(),
            compositions: self
                .to_raw()
                .compositions
                .into_iter()
                .filter(|c| {
                    let f = self.morphism_index(&c.first).unwrap();
                    keep_mor(&self.morphisms[f]) && {
                        let g = self.morphism_index(&c.then).unwrap();
                        keep_mor(&self.morphisms[g])
                    }
                })
                .collect(),
        };
        validate_category(&raw)
    }
}

/// Pairwise product; identifiers of pairs are joined with `×`.
pub fn product(a: &FiniteCategory, b: &FiniteCategory) -> Result<FiniteCategory> {
    Ok(product_many(&[a, b])?.0)
}

#[derive(Debug, Default)]
pub struct ProductStructure {
    /// Component object indices -> product object index.
    pub object_index: HashMap<Vec<usize>, usize>,
    pub object_components: Vec<Vec<usize>>,
    /// Component morphism indices -> product morphism index (identity
    /// tuples included).
    pub morphism_index: HashMap<Vec<usize>, usize>,
    pub morphism_components: Vec<Vec<usize>>,
}

pub fn join_ids<'a>(parts: impl Iterator<Item = &'a str>) -> String {
    parts.collect::<Vec<_>>().join("×")
}

pub fn product_many(factors: &[&FiniteCategory]) -> Result<(FiniteCategory, ProductStructure)> {
    if factors.is_empty() {
        return Err(Error::PreconditionFailed {
            detail: "product of zero categories".into(),
        });
    }
    let n_obj: usize = factors.iter().map(|c| c.object_count()).product();
    let n_mor: usize = factors.iter().map(|c| c.morphism_count()).product();
    size::check("product morphisms", n_mor.max(n_obj))?;

    // Enumerate index tuples in lexicographic order, first factor slowest.
    fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for &s in sizes {
            let mut next = Vec::with_capacity(out.len() * s);
            for t in &out {
                for i in 0..s {
                    let mut t2 = t.clone();
                    t2.push(i);
                    next.push(t2);
                }
            }
            out = next;
        }
        out
    }

    let obj_tuples = tuples(&factors.iter().map(|c| c.object_count()).collect::<Vec<_>>());
    let mut objects = Vec::with_capacity(obj_tuples.len());
    let mut object_index = HashMap::new();
    for (i, t) in obj_tuples.iter().enumerate() {
        objects.push(join_ids(
            t.iter().zip(factors).map(|(&o, c)| c.object_id(o)),
        ));
        object_index.insert(t.clone(), i);
    }

    let mor_tuples = tuples(&factors.iter().map(|c| c.morphism_count()).collect::<Vec<_>>());
    let mut raw_morphisms = Vec::new();
    let mut nonid_tuples = Vec::new();
    for t in &mor_tuples {
        if t.iter().zip(factors).all(|(&m, c)| c.is_identity(m)) {
            continue;
        }
        raw_morphisms.push(RawMorphism {
            id: join_ids(t.iter().zip(factors).map(|(&m, c)| c.morphism_id(m))),
            src: join_ids(t.iter().zip(factors).map(|(&m, c)| c.object_id(c.src(m)))),
            dst: join_ids(t.iter().zip(factors).map(|(&m, c)| c.object_id(c.dst(m)))),
        });
        nonid_tuples.push(t.clone());
    }

    // Composition is componentwise; enumerate composable pairs via the
    // product endpoints.
    let src_of = |t: &[usize]| -> Vec<usize> {
        t.iter().zip(factors).map(|(&m, c)| c.src(m)).collect()
    };
    let dst_of = |t: &[usize]| -> Vec<usize> {
        t.iter().zip(factors).map(|(&m, c)| c.dst(m)).collect()
    };
    let mut by_src: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (k, t) in nonid_tuples.iter().enumerate() {
        by_src.entry(src_of(t)).or_default().push(k);
    }
    let name_of = |t: &[usize]| -> String {
        if t.iter().zip(factors).all(|(&m, c)| c.is_identity(m)) {
            identity_name(&join_ids(
                t.iter().zip(factors).map(|(&m, c)| c.object_id(c.src(m))),
            ))
        } else {
            join_ids(t.iter().zip(factors).map(|(&m, c)| c.morphism_id(m)))
        }
    };
    let mut compositions = Vec::new();
    for (k, f) in nonid_tuples.iter().enumerate() {
        let mid = dst_of(f);
        if let Some(gs) = by_src.get(&mid) {
            for &k2 in gs {
                let g = &nonid_tuples[k2];
                let mut h = Vec::with_capacity(f.len());
                for ((&fm, &gm), c) in f.iter().zip(g).zip(factors) {
                    h.push(c.compose(fm, gm)?);
                }
                compositions.push(RawComposition {
                    first: raw_morphisms[k].id.clone(),
                    then: raw_morphisms[k2].id.clone(),
                    equals: name_of(&h),
                });
            }
        }
    }

    let raw = RawCategory {
        objects,
        morphisms: raw_morphisms,
        compositions,
    };
    let cat = validate_category(&raw)?;

    let mut structure = ProductStructure {
        object_index,
        object_components: obj_tuples,
        ..Default::default()
    };
    // Identities come first in the validated category, one per object.
    for (o, t) in structure.object_components.iter().enumerate() {
        let id_tuple: Vec<usize> = t.iter().zip(factors).map(|(&ob, c)| c.identity_of(ob)).collect();
        structure.morphism_index.insert(id_tuple, o);
    }
    for (k, t) in nonid_tuples.into_iter().enumerate() {
        structure.morphism_index.insert(t, cat.object_count() + k);
    }
    let mut components = vec![Vec::new(); cat.morphism_count()];
    for (t, &m) in &structure.morphism_index {
        components[m] = t.clone();
    }
    structure.morphism_components = components;
    Ok((cat, structure))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawFunctor {
    pub on_objects: BTreeMap<String, String>,
    pub on_morphisms: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctorData {
    source: FiniteCategory,
    target: FiniteCategory,
    object_map: Vec<usize>,
    morphism_map: Vec<usize>,
}

pub fn validate_functor(
    source: &FiniteCategory,
    target: &FiniteCategory,
    raw: &RawFunctor,
) -> Result<FunctorData> {
    for key in raw.on_objects.keys() {
        if source.object_index(key).is_none() {
            return Err(Error::DanglingReference {
                context: "functor object map".into(),
                missing: key.clone(),
            });
        }
    }
    for key in raw.on_morphisms.keys() {
        match source.morphism_index(key) {
            None => {
                return Err(Error::DanglingReference {
                    context: "functor morphism map".into(),
                    missing: key.clone(),
                })
            }
            Some(m) if source.is_identity(m) => {
                return Err(Error::NotAFunctor {
                    detail: format!("identity `{key}` is mapped automatically"),
                })
            }
            Some(_) => {}
        }
    }

    let mut object_map = Vec::with_capacity(source.object_count());
    for o in source.objects() {
        let image = raw.on_objects.get(o).ok_or_else(|| Error::NotAFunctor {
            detail: format!("object `{o}` is not mapped"),
        })?;
        let ix = target.object_index(image).ok_or_else(|| Error::DanglingReference {
            context: format!("image of object `{o}`"),
            missing: image.clone(),
        })?;
        object_map.push(ix);
    }

    let mut morphism_map = Vec::with_capacity(source.morphism_count());
    for o in 0..source.object_count() {
        morphism_map.push(target.identity_of(object_map[o]));
    }
    for m in source.non_identity_morphisms() {
        let id = source.morphism_id(m);
        let image = raw.on_morphisms.get(id).ok_or_else(|| Error::NotAFunctor {
            detail: format!("morphism `{id}` is not mapped"),
        })?;
        let ix = target.morphism_index(image).ok_or_else(|| Error::DanglingReference {
            context: format!("image of morphism `{id}`"),
            missing: image.clone(),
        })?;
        if target.src(ix) != object_map[source.src(m)] || target.dst(ix) != object_map[source.dst(m)]
        {
            return Err(Error::NotAFunctor {
                detail: format!("image of `{id}` has wrong endpoints"),
            });
        }
        morphism_map.push(ix);
    }

    let data = FunctorData {
        source: source.clone(),
        target: target.clone(),
        object_map,
        morphism_map,
    };
    for f in source.non_identity_morphisms() {
        for g in source.non_identity_morphisms() {
            if source.dst(f) != source.src(g) {
                continue;
            }
            let h = source.compose(f, g)?;
            let expected = target.compose(data.morphism_map[f], data.morphism_map[g])?;
            if data.morphism_map[h] != expected {
                return Err(Error::NotAFunctor {
                    detail: format!(
                        "composition (`{}`, `{}`) is not preserved",
                        source.morphism_id(f),
                        source.morphism_id(g)
                    ),
                });
            }
        }
    }
    Ok(data)
}

impl FunctorData {
    pub fn source(&self) -> &FiniteCategory {
        &self.source
    }

    pub fn target(&self) -> &FiniteCategory {
        &self.target
    }

    pub fn object_image(&self, o: usize) -> usize {
        self.object_map[o]
    }

    pub fn morphism_image(&self, m: usize) -> usize {
        self.morphism_map[m]
    }

    pub fn to_raw(&self) -> RawFunctor {
        let mut raw = RawFunctor::default();
        for (o, &img) in self.object_map.iter().enumerate() {
            raw.on_objects.insert(
                self.source.object_id(o).to_string(),
                self.target.object_id(img).to_string(),
            );
        }
        for m in self.source.non_identity_morphisms() {
            raw.on_morphisms.insert(
                self.source.morphism_id(m).to_string(),
                self.target.morphism_id(self.morphism_map[m]).to_string(),
            );
        }
        raw
    }

    /// Same maps between the opposite categories.
    pub fn opposite(&self) -> FunctorData {
        let source = self.source.opposite();
        let target = self.target.opposite();
        validate_functor(&source, &target, &self.to_raw())
            .expect("opposite of a valid functor is valid")
    }
}

pub fn identity_functor(c: &FiniteCategory) -> FunctorData {
    let mut raw = RawFunctor::default();
    for o in c.objects() {
        raw.on_objects.insert(o.clone(), o.clone());
    }
    for m in c.non_identity_morphisms() {
        raw.on_morphisms
            .insert(c.morphism_id(m).to_string(), c.morphism_id(m).to_string());
    }
    validate_functor(c, c, &raw).expect("identity functor is valid")
}

/// Composite `second ∘ first`.
pub fn compose_functors(first: &FunctorData, second: &FunctorData) -> Result<FunctorData> {
    if first.target != second.source {
        return Err(Error::ShapeMismatch {
            detail: "functor composition: target and source differ".into(),
        });
    }
    let mut raw = RawFunctor::default();
    for o in 0..first.source.object_count() {
        raw.on_objects.insert(
            first.source.object_id(o).to_string(),
            second
                .target
                .object_id(second.object_image(first.object_image(o)))
                .to_string(),
        );
    }
    for m in first.source.non_identity_morphisms() {
        raw.on_morphisms.insert(
            first.source.morphism_id(m).to_string(),
            second
                .target
                .morphism_id(second.morphism_image(first.morphism_image(m)))
                .to_string(),
        );
    }
    validate_functor(&first.source, &second.target, &raw)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommaObject {
    /// Object of the functor's source.
    pub object: String,
    /// The structure arrow of the target (G a → d, or d → G a for the
    /// under version).
    pub arrow: String,
}

/// A comma category together with the data identifying each object and the
/// source morphism underlying each comma morphism.
#[derive(Debug, Clone)]
pub struct CommaCategory {
    pub category: FiniteCategory,
    pub objects: Vec<CommaObject>,
    pub arrows: Vec<String>,
}

impl CommaCategory {
    pub fn object_index_of(&self, object: &str, arrow: &str) -> Option<usize> {
        self.objects
            .iter()
            .position(|c| c.object == object && c.arrow == arrow)
    }

    /// The forgetful functor to the comma construction's source category.
    pub fn projection(&self, source: &FiniteCategory) -> Result<FunctorData> {
        let mut raw = RawFunctor::default();
        for (i, co) in self.objects.iter().enumerate() {
            raw.on_objects
                .insert(self.category.object_id(i).to_string(), co.object.clone());
        }
        for m in self.category.non_identity_morphisms() {
            raw.on_morphisms.insert(
                self.category.morphism_id(m).to_string(),
                self.arrows[m].clone(),
            );
        }
        validate_functor(&self.category, source, &raw)
    }
}

pub fn comma_object_name(object: &str, arrow: &str) -> String {
    format!("({object}|{arrow})")
}

enum CommaSide {
    Over,
    Under,
}

fn comma(f: &FunctorData, d: &str, side: CommaSide) -> Result<CommaCategory> {
    let target = f.target();
    let source = f.source();
    let d_ix = target.object_index(d).ok_or_else(|| Error::DanglingReference {
        context: "comma category anchor".into(),
        missing: d.into(),
    })?;

    let mut objects = Vec::new();
    for a in 0..source.object_count() {
        let arrows = match side {
            CommaSide::Over => target.hom(f.object_image(a), d_ix),
            CommaSide::Under => target.hom(d_ix, f.object_image(a)),
        };
        for &arrow in arrows {
            objects.push((a, arrow));
        }
    }

    let mut raw_morphisms = Vec::new();
    let mut arrows = Vec::new();
    let mut lookup: HashMap<(usize, usize, usize), String> = HashMap::new();
    let obj_name = |&(a, arrow): &(usize, usize)| {
        comma_object_name(source.object_id(a), target.morphism_id(arrow))
    };
    for (i, &(a, fa)) in objects.iter().enumerate() {
        for (j, &(a2, fa2)) in objects.iter().enumerate() {
            for &m in source.hom(a, a2) {
                if source.is_identity(m) {
                    continue;
                }
                let gm = f.morphism_image(m);
                let commutes = match side {
                    // f2 ∘ G m = f
                    CommaSide::Over => target.compose(gm, fa2)? == fa,
                    // G m ∘ f = f2
                    CommaSide::Under => target.compose(fa, gm)? == fa2,
                };
                if commutes {
                    let id = format!("{}[{i}>{j}]", source.morphism_id(m));
                    raw_morphisms.push(RawMorphism {
                        id: id.clone(),
                        src: obj_name(&objects[i]),
                        dst: obj_name(&objects[j]),
                    });
                    arrows.push((i, j, m, id));
                    lookup.insert((i, j, m), arrows.last().unwrap().3.clone());
                }
            }
        }
    }
    // Identity comma morphisms, for composite lookup.
    for (i, &(a, _)) in objects.iter().enumerate() {
        lookup.insert(
            (i, i, source.identity_of(a)),
            identity_name(&obj_name(&objects[i])),
        );
    }

    let mut compositions = Vec::new();
    for &(i, j, m1, ref id1) in &arrows {
        for &(j2, k, m2, ref id2) in &arrows {
            if j2 != j {
                continue;
            }
            let m = source.compose(m1, m2)?;
            let equals = lookup
                .get(&(i, k, m))
                .cloned()
                .ok_or_else(|| Error::PreconditionFailed {
                    detail: "comma category is not closed under composition".into(),
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

    let mut underlying = Vec::with_capacity(category.morphism_count());
    for (i, &(a, _)) in objects.iter().enumerate() {
        let _ = i;
        underlying.push(source.morphism_id(source.identity_of(a)).to_string());
    }
    for &(_, _, m, _) in &arrows {
        underlying.push(source.morphism_id(m).to_string());
    }

    Ok(CommaCategory {
        category,
        objects: objects
            .into_iter()
            .map(|(a, arrow)| CommaObject {
                object: source.object_id(a).to_string(),
                arrow: target.morphism_id(arrow).to_string(),
            })
            .collect(),
        arrows: underlying,
    })
}

/// The comma category G ↓ d: pairs (a, f: G a → d).
pub fn comma_over(f: &FunctorData, d: &str) -> Result<CommaCategory> {
    comma(f, d, CommaSide::Over)
}

/// The comma category d ↓ G: pairs (a, f: d → G a).
pub fn comma_under(f: &FunctorData, d: &str) -> Result<CommaCategory> {
    comma(f, d, CommaSide::Under)
}

/// Path components of the nerve. The nerve's 1-skeleton determines
/// connectivity, so this is plain multigraph connectivity over the edges
/// {src(f), dst(f)}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pi0 {
    /// Sorted by representative id; members in object order.
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
    /// Lexicographically least object id of each component.
    pub representatives: Vec<usize>,
}

impl Pi0 {
    pub fn count(&self) -> usize {
        self.components.len()
    }
}

pub fn pi0(c: &FiniteCategory) -> Pi0 {
    let mut uf = UnionFind::new(c.object_count());
    for m in c.non_identity_morphisms() {
        uf.union(c.src(m), c.dst(m));
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for o in 0..c.object_count() {
        let root = uf.find(o);
        groups.entry(root).or_default().push(o);
    }
    let mut components: Vec<Vec<usize>> = groups.into_values().collect();
    let repr_of = |comp: &Vec<usize>| -> usize {
        *comp
            .iter()
            .min_by(|&&a, &&b| c.object_id(a).cmp(c.object_id(b)))
            .unwrap()
    };
    components.sort_by(|a, b| c.object_id(repr_of(a)).cmp(c.object_id(repr_of(b))));
    let mut component_of = vec![0; c.object_count()];
    for (k, comp) in components.iter().enumerate() {
        for &o in comp {
            component_of[o] = k;
        }
    }
    let representatives = components.iter().map(repr_of).collect();
    Pi0 {
        components,
        component_of,
        representatives,
    }
}

#[derive(Debug, Clone)]
pub struct Isomorphism {
    pub object_map: Vec<usize>,
    pub morphism_map: Vec<usize>,
}

/// Backtracking search for an isomorphism of categories. Intended for the
/// small categories produced by the factorization and comma constructions;
/// prunes on hom-set cardinalities.
pub fn find_isomorphism(a: &FiniteCategory, b: &FiniteCategory) -> Option<Isomorphism> {
    if a.object_count() != b.object_count() || a.morphism_count() != b.morphism_count() {
        return None;
    }
    let n = a.object_count();

    let signature = |c: &FiniteCategory, o: usize| -> (Vec<usize>, Vec<usize>, usize) {
        let mut outs: Vec<usize> = (0..n).map(|t| c.hom(o, t).len()).collect();
        let mut ins: Vec<usize> = (0..n).map(|s| c.hom(s, o).len()).collect();
        let endos = c.hom(o, o).len();
        outs.sort_unstable();
        ins.sort_unstable();
        (outs, ins, endos)
    };
    let sig_a: Vec<_> = (0..n).map(|o| signature(a, o)).collect();
    let sig_b: Vec<_> = (0..n).map(|o| signature(b, o)).collect();

    fn assign_objects(
        a: &FiniteCategory,
        b: &FiniteCategory,
        sig_a: &[(Vec<usize>, Vec<usize>, usize)],
        sig_b: &[(Vec<usize>, Vec<usize>, usize)],
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        next: usize,
    ) -> Option<Isomorphism> {
        let n = map.len();
        if next == n {
            return assign_morphisms(a, b, &map.iter().map(|o| o.unwrap()).collect::<Vec<_>>());
        }
        for cand in 0..n {
            if used[cand] || sig_a[next] != sig_b[cand] {
                continue;
            }
            let ok = (0..next).all(|prev| {
                let p = map[prev].unwrap();
                a.hom(next, prev).len() == b.hom(cand, p).len()
                    && a.hom(prev, next).len() == b.hom(p, cand).len()
            });
            if !ok {
                continue;
            }
            map[next] = Some(cand);
            used[cand] = true;
            if let Some(iso) = assign_objects(a, b, sig_a, sig_b, map, used, next + 1) {
                return Some(iso);
            }
            map[next] = None;
            used[cand] = false;
        }
        None
    }

    fn assign_morphisms(
        a: &FiniteCategory,
        b: &FiniteCategory,
        object_map: &[usize],
    ) -> Option<Isomorphism> {
        let mut mor_map: Vec<Option<usize>> = vec![None; a.morphism_count()];
        let mut used = vec![false; b.morphism_count()];
        for o in 0..a.object_count() {
            let img = b.identity_of(object_map[o]);
            mor_map[a.identity_of(o)] = Some(img);
            used[img] = true;
        }
        fn rec(
            a: &FiniteCategory,
            b: &FiniteCategory,
            object_map: &[usize],
            mor_map: &mut Vec<Option<usize>>,
            used: &mut Vec<bool>,
            next: usize,
        ) -> bool {
            let next = match (next..a.morphism_count()).find(|&m| mor_map[m].is_none()) {
                None => return verify(a, b, mor_map),
                Some(m) => m,
            };
            let (s, d) = (object_map[a.src(next)], object_map[a.dst(next)]);
            for &cand in b.hom(s, d) {
                if used[cand] || b.is_identity(cand) {
                    continue;
                }
                mor_map[next] = Some(cand);
                used[cand] = true;
                if consistent_so_far(a, b, mor_map, next)
                    && rec(a, b, object_map, mor_map, used, next + 1)
                {
                    return true;
                }
                mor_map[next] = None;
                used[cand] = false;
            }
            false
        }

        /// Check composites involving the newly assigned morphism whenever
        /// all three images are known.
        fn consistent_so_far(
            a: &FiniteCategory,
            b: &FiniteCategory,
            mor_map: &[Option<usize>],
            new: usize,
        ) -> bool {
            for f in 0..a.morphism_count() {
                let Some(ff) = mor_map[f] else { continue };
                for (x, y, fx, fy) in [(f, new, ff, mor_map[new].unwrap()), (new, f, mor_map[new].unwrap(), ff)]
                {
                    if a.dst(x) != a.src(y) {
                        continue;
                    }
                    let h = a.compose(x, y).unwrap();
                    if let Some(fh) = mor_map[h] {
                        if b.compose(fx, fy).unwrap() != fh {
                            return false;
                        }
                    }
                }
            }
            true
        }

        fn verify(a: &FiniteCategory, b: &FiniteCategory, mor_map: &[Option<usize>]) -> bool {
            for f in 0..a.morphism_count() {
                for g in 0..a.morphism_count() {
                    if a.dst(f) != a.src(g) {
                        continue;
                    }
                    let h = a.compose(f, g).unwrap();
                    let img = b
                        .compose(mor_map[f].unwrap(), mor_map[g].unwrap())
                        .unwrap();
                    if mor_map[h].unwrap() != img {
                        return false;
                    }
                }
            }
            true
        }

        if rec(a, b, object_map, &mut mor_map, &mut used, 0) {
            Some(Isomorphism {
                object_map: object_map.to_vec(),
                morphism_map: mor_map.into_iter().map(|m| m.unwrap()).collect(),
            })
        } else {
            None
        }
    }

    let mut map = vec![None; n];
    let mut used = vec![false; n];
    assign_objects(a, b, &sig_a, &sig_b, &mut map, &mut used, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw_mor(id: &str, src: &str, dst: &str) -> RawMorphism {
        RawMorphism {
            id: id.into(),
            src: src.into(),
            dst: dst.into(),
        }
    }

    fn raw_comp(first: &str, then: &str, equals: &str) -> RawComposition {
        RawComposition {
            first: first.into(),
            then: then.into(),
            equals: equals.into(),
        }
    }

    /// A commuting square: two factorizations of the same composite.
    fn square() -> RawCategory {
        RawCategory {
            objects: vec!["alpha".into(), "gamma".into(), "delta".into(), "beta".into()],
            morphisms: vec![
                raw_mor("p", "alpha", "gamma"),
                raw_mor("q", "gamma", "beta"),
                raw_mor("r", "alpha", "delta"),
                raw_mor("s", "delta", "beta"),
                raw_mor("qp", "alpha", "beta"),
            ],
            compositions: vec![raw_comp("p", "q", "qp"), raw_comp("r", "s", "qp")],
        }
    }

    #[test]
    fn empty_and_terminal() {
        let empty = FiniteCategory::empty();
        assert_eq!(empty.object_count(), 0);
        assert_eq!(empty.morphism_count(), 0);

        let pt = validate_category(&RawCategory {
            objects: vec!["*".into()],
            ..Default::default()
        })
        .unwrap();
        assert_eq!(pt.morphism_count(), 1);
        assert!(pt.is_identity(0));
        assert_eq!(pt.morphism_id(0), "id:*");
    }

    #[test]
    fn square_composes() {
        let c = validate_category(&square()).unwrap();
        assert_eq!(c.object_count(), 4);
        assert_eq!(c.morphism_count(), 9);
        assert_eq!(c.compose_ids("p", "q").unwrap(), "qp");
        assert_eq!(c.compose_ids("r", "s").unwrap(), "qp");
        assert_eq!(c.compose_ids("id:alpha", "p").unwrap(), "p");
        assert_eq!(c.compose_ids("p", "id:gamma").unwrap(), "p");
        assert!(matches!(
            c.compose_ids("q", "p"),
            Err(Error::NotComposable { .. })
        ));
    }

    #[test]
    fn missing_composition_is_rejected() {
        let mut raw = square();
        raw.compositions.pop();
        let err = validate_category(&raw).unwrap_err();
        assert!(matches!(err, Error::MissingComposition { first, then }
            if first == "r" && then == "s"));
    }

    #[test]
    fn broken_associativity_is_rejected() {
        // Three composable arrows with both orders of bracketing forced to
        // disagree: f: a->a, with f∘f = id and f∘f = f in conflict via a
        // doctored table. Use a monoid-like single object with two
        // endomorphisms.
        let raw = RawCategory {
            objects: vec!["a".into()],
            morphisms: vec![raw_mor("f", "a", "a"), raw_mor("g", "a", "a")],
            compositions: vec![
                raw_comp("f", "f", "g"),
                raw_comp("f", "g", "g"),
                raw_comp("g", "f", "f"),
                raw_comp("g", "g", "g"),
            ],
        };
        // (f∘f)∘f = g∘f = f but f∘(f∘f) = f∘g ... check both orders via the
        // validator; the table above breaks associativity.
        let err = validate_category(&raw).unwrap_err();
        assert!(matches!(err, Error::BrokenAssociativity { .. }));
    }

    #[test]
    fn duplicate_and_dangling_are_rejected() {
        let mut raw = square();
        raw.objects.push("alpha".into());
        assert!(matches!(
            validate_category(&raw).unwrap_err(),
            Error::DuplicateId { .. }
        ));

        let mut raw = square();
        raw.morphisms.push(raw_mor("t", "alpha", "nowhere"));
        assert!(matches!(
            validate_category(&raw).unwrap_err(),
            Error::DanglingReference { .. }
        ));
    }

    #[test]
    fn opposite_is_involutive() {
        let c = validate_category(&square()).unwrap();
        let op = c.opposite();
        assert_eq!(op.compose_ids("q", "p").unwrap(), "qp");
        assert!(op.compose_ids("p", "q").is_err());
        assert_eq!(op.opposite(), c);
    }

    #[test]
    fn full_subcategory_drops_outside_morphisms() {
        let c = validate_category(&square()).unwrap();
        let sub = c.full_subcategory(&["alpha", "gamma", "delta"]).unwrap();
        assert_eq!(sub.object_count(), 3);
        // Three identities plus p and r.
        assert_eq!(sub.morphism_count(), 5);
        assert!(sub.morphism_index("p").is_some());
        assert!(sub.morphism_index("q").is_none());

        let all = c
            .full_subcategory(&["alpha", "gamma", "delta", "beta"])
            .unwrap();
        assert_eq!(all, c);
    }

    #[test]
    fn product_counts_and_composition() {
        let arrow = validate_category(&RawCategory {
            objects: vec!["0".into(), "1".into()],
            morphisms: vec![raw_mor("f", "0", "1")],
            compositions: vec![],
        })
        .unwrap();
        let (p, ix) = product_many(&[&arrow, &arrow]).unwrap();
        assert_eq!(p.object_count(), 4);
        // 3 morphisms per factor, 9 tuples, minus 4 identity tuples plus the
        // 4 product identities.
        assert_eq!(p.morphism_count(), 9);
        assert!(p.object_index("0×1").is_some());
        assert!(p.morphism_index("f×f").is_some());
        assert!(p.morphism_index("f×id:1").is_some());
        assert_eq!(
            p.compose_ids("f×id:0", "id:1×f").unwrap(),
            "f×f"
        );
        assert_eq!(
            p.compose_ids("id:0×f", "f×id:1").unwrap(),
            "f×f"
        );
        let f = arrow.morphism_index("f").unwrap();
        let ff = p.morphism_index("f×f").unwrap();
        assert_eq!(ix.morphism_components[ff], vec![f, f]);
        assert_eq!(ix.morphism_index[&vec![f, f]], ff);
    }

    #[test]
    fn functor_validation_checks_composition() {
        let c = validate_category(&square()).unwrap();
        let mut raw = RawFunctor::default();
        for o in c.objects() {
            raw.on_objects.insert(o.clone(), o.clone());
        }
        for m in ["p", "q", "r", "s", "qp"] {
            raw.on_morphisms.insert(m.into(), m.into());
        }
        assert!(validate_functor(&c, &c, &raw).is_ok());

        // Swap the images of the two factorizations' composites: p ↦ r is
        // fine on endpoints only if objects move too; instead break
        // functoriality by sending qp elsewhere while keeping p, q fixed.
        let mut bad = raw.clone();
        bad.on_objects.insert("gamma".into(), "delta".into());
        bad.on_morphisms.insert("p".into(), "r".into());
        bad.on_morphisms.insert("q".into(), "s".into());
        // p;q now lands on r;s = qp, still consistent. Break it for real:
        bad.on_morphisms.insert("qp".into(), "qp".into());
        assert!(validate_functor(&c, &c, &bad).is_ok());
        let mut worse = RawFunctor::default();
        for o in c.objects() {
            worse.on_objects.insert(o.clone(), o.clone());
        }
        worse.on_morphisms.insert("p".into(), "p".into());
        worse.on_morphisms.insert("q".into(), "q".into());
        worse.on_morphisms.insert("r".into(), "r".into());
        worse.on_morphisms.insert("s".into(), "s".into());
        worse.on_morphisms.insert("qp".into(), "qp".into());
        // Remove a required entry.
        worse.on_morphisms.remove("qp");
        assert!(matches!(
            validate_functor(&c, &c, &worse).unwrap_err(),
            Error::NotAFunctor { .. }
        ));
    }

    #[test]
    fn comma_over_collects_triangles() {
        let c = validate_category(&square()).unwrap();
        let id = identity_functor(&c);
        let over_beta = comma_over(&id, "beta").unwrap();
        // Arrows into beta: qp, q, s, id:beta.
        assert_eq!(over_beta.objects.len(), 4);
        assert!(over_beta.object_index_of("alpha", "qp").is_some());
        assert!(over_beta.object_index_of("beta", "id:beta").is_some());
        // Non-identity comma morphisms: p (qp->q), r (qp->s), q (q->id),
        // s (s->id), qp (qp->id).
        assert_eq!(over_beta.category.morphism_count(), 4 + 5);

        let under_alpha = comma_under(&id, "alpha").unwrap();
        assert_eq!(under_alpha.objects.len(), 4);
    }

    #[test]
    fn comma_projection_is_a_functor() {
        let c = validate_category(&square()).unwrap();
        let id = identity_functor(&c);
        let over_beta = comma_over(&id, "beta").unwrap();
        let proj = over_beta.projection(&c).unwrap();
        assert_eq!(proj.source().object_count(), 4);
    }

    #[test]
    fn pi0_counts_components() {
        let two = validate_category(&RawCategory {
            objects: vec!["x".into(), "y".into()],
            ..Default::default()
        })
        .unwrap();
        let p = pi0(&two);
        assert_eq!(p.count(), 2);
        assert_eq!(p.representatives, vec![0, 1]);

        let c = validate_category(&square()).unwrap();
        assert_eq!(pi0(&c).count(), 1);
        assert_eq!(pi0(&FiniteCategory::empty()).count(), 0);
    }

    #[test]
    fn isomorphism_search_finds_relabeling() {
        let c = validate_category(&square()).unwrap();
        let mut relabeled = square();
        relabeled.objects = vec!["w".into(), "x".into(), "y".into(), "z".into()];
        for m in &mut relabeled.morphisms {
            for (old, new) in [("alpha", "w"), ("gamma", "x"), ("delta", "y"), ("beta", "z")] {
                if m.src == old {
                    m.src = new.into();
                }
                if m.dst == old {
                    m.dst = new.into();
                }
            }
        }
        let d = validate_category(&relabeled).unwrap();
        let iso = find_isomorphism(&c, &d).expect("relabeled copy is isomorphic");
        assert_eq!(iso.object_map.len(), 4);

        // A 4-object category with a different shape is not isomorphic.
        let mut other = square();
        other.morphisms.push(raw_mor("extra", "alpha", "beta"));
        let e = validate_category(&other).unwrap();
        assert!(find_isomorphism(&c, &e).is_none());
    }
}
