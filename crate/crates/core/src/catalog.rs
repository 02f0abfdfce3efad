//! Builders for the standing example categories and functors, plus seeded
//! random instances for the property suites.
//!
//! Everything here returns fully validated values: the builders run the same
//! validators as user input, so a bug in a builder surfaces as an error
//! rather than as a quietly malformed fixture.

use crate::error::{Error, Result};
use crate::fincat::{
    validate_category, validate_functor, FiniteCategory, RawCategory, RawComposition, RawFunctor,
    RawMorphism,
};
use crate::quillen::{validate_reedy_functor, ReedyFunctor};
use crate::reedy::{product_reedy_many, truncate, validate_reedy, RawReedy, ReedyCategory};
use crate::setdiag::{sum_of_representables, validate_diagram, RawDiagram, SetDiagram};
use crate::union_find::UnionFind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// A weakly monotone map between finite ordinals `[source]` and `[target]`,
/// recorded by its image tuple of length `source + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneMap {
    pub source: usize,
    pub target: usize,
    pub image: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(source: usize, target: usize, image: Vec<usize>) -> Result<MonotoneMap> {
        if image.len() != source + 1 {
            return Err(Error::PreconditionFailed {
                detail: format!(
                    "monotone map out of [{source}] needs {} values, got {}",
                    source + 1,
                    image.len()
                ),
            });
        }
        if image.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::PreconditionFailed {
                detail: format!("image tuple {image:?} is not weakly increasing"),
            });
        }
        if image.iter().any(|&v| v > target) {
            return Err(Error::PreconditionFailed {
                detail: format!("image tuple {image:?} exceeds target [{target}]"),
            });
        }
        Ok(MonotoneMap {
            source,
            target,
            image,
        })
    }

    pub fn identity(n: usize) -> MonotoneMap {
        MonotoneMap {
            source: n,
            target: n,
            image: (0..=n).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.image.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Pointwise substitution: `self` followed by `then`.
    pub fn compose(&self, then: &MonotoneMap) -> Result<MonotoneMap> {
        if self.target != then.source {
            return Err(Error::PreconditionFailed {
                detail: format!(
                    "cannot compose [{}]->[{}] with [{}]->[{}]",
                    self.source, self.target, then.source, then.target
                ),
            });
        }
        Ok(MonotoneMap {
            source: self.source,
            target: then.target,
            image: self.image.iter().map(|&v| then.image[v]).collect(),
        })
    }

    pub fn is_injective(&self) -> bool {
        self.image.windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target + 1];
        for &v in &self.image {
            hit[v] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Canonical name, e.g. `d[1->2]:(0,2)`.
    pub fn name(&self) -> String {
        let vals: Vec<String> = self.image.iter().map(|v| v.to_string()).collect();
        format!(
            "d[{}->{}]:({})",
            self.source,
            self.target,
            vals.join(",")
        )
    }
}

/// All weakly monotone maps `[a] -> [b]` in lexicographic image order.
pub fn monotone_maps(a: usize, b: usize) -> Vec<MonotoneMap> {
    fn extend(a: usize, b: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == a + 1 {
            out.push(prefix.clone());
            return;
        }
        let lo = prefix.last().copied().unwrap_or(0);
        for v in lo..=b {
            prefix.push(v);
            extend(a, b, prefix, out);
            prefix.pop();
        }
    }
    let mut tuples = Vec::new();
    extend(a, b, &mut Vec::new(), &mut tuples);
    tuples
        .into_iter()
        .map(|image| MonotoneMap {
            source: a,
            target: b,
            image,
        })
        .collect()
}

fn ordinal_name(k: usize) -> String {
    format!("[{k}]")
}

fn delta_raw(n: usize, injective_only: bool) -> (RawCategory, RawReedy) {
    let mut raw = RawCategory::default();
    let mut reedy = RawReedy::default();
    let mut kept: Vec<MonotoneMap> = Vec::new();
    for k in 0..=n {
        raw.objects.push(ordinal_name(k));
        reedy.degrees.insert(ordinal_name(k), k as u32);
    }
    for a in 0..=n {
        for b in 0..=n {
            for m in monotone_maps(a, b) {
                if m.is_identity() || (injective_only && !m.is_injective()) {
                    continue;
                }
                raw.morphisms.push(RawMorphism {
                    id: m.name(),
                    src: ordinal_name(a),
                    dst: ordinal_name(b),
                });
                if m.is_injective() {
                    reedy.direct.insert(m.name());
                } else if m.is_surjective() {
                    reedy.inverse.insert(m.name());
                }
                kept.push(m);
            }
        }
    }
    for f in &kept {
        for g in &kept {
            if f.target != g.source {
                continue;
            }
            let fg = f.compose(g).expect("targets were checked");
            let equals = if fg.is_identity() {
                format!("id:{}", ordinal_name(fg.source))
            } else {
                fg.name()
            };
            raw.compositions.push(RawComposition {
                first: f.name(),
                then: g.name(),
                equals,
            });
        }
    }
    (raw, reedy)
}

/// The full subcategory of the simplex category on the ordinals `[0]..[n]`:
/// all weakly monotone maps, with injections direct and surjections inverse.
pub fn delta_truncated(n: usize) -> Result<ReedyCategory> {
    let (raw, reedy) = delta_raw(n, false);
    validate_reedy(&validate_category(&raw)?, &reedy)
}

/// The injections-only variant on `[0]..[n]`, together with its inclusion
/// into `delta_truncated(n)`. Its inverse subcategory is trivial.
pub fn delta_rest_truncated(n: usize) -> Result<(ReedyCategory, ReedyFunctor)> {
    let (raw, reedy) = delta_raw(n, true);
    let rest = validate_reedy(&validate_category(&raw)?, &reedy)?;
    let full = delta_truncated(n)?;
    let mut inc = RawFunctor::default();
    for o in rest.base().objects() {
        inc.on_objects.insert(o.clone(), o.clone());
    }
    for m in rest.base().non_identity_morphisms() {
        let id = rest.base().morphism_id(m);
        inc.on_morphisms.insert(id.into(), id.into());
    }
    let data = validate_functor(rest.base(), full.base(), &inc)?;
    let functor = validate_reedy_functor(&rest, &full, &data)?;
    Ok((rest, functor))
}

/// The m-fold product of `r` with itself, degrees adding up.
pub fn power_reedy(r: &ReedyCategory, m: usize) -> Result<ReedyCategory> {
    let factors: Vec<&ReedyCategory> = std::iter::repeat(r).take(m).collect();
    Ok(product_reedy_many(&factors)?.0)
}

/// The diagonal `[k] -> ([k],...,[k])` from `delta_truncated(n)` into its
/// m-fold power.
pub fn diagonal_functor(n: usize, m: usize) -> Result<ReedyFunctor> {
    let d = delta_truncated(n)?;
    let factors: Vec<&ReedyCategory> = std::iter::repeat(&d).take(m).collect();
    let (power, structure) = product_reedy_many(&factors)?;
    let mut raw = RawFunctor::default();
    for o in 0..d.base().object_count() {
        let target = structure.object_index[&vec![o; m]];
        raw.on_objects.insert(
            d.base().object_id(o).into(),
            power.base().object_id(target).into(),
        );
    }
    for mor in d.base().non_identity_morphisms() {
        let target = structure.morphism_index[&vec![mor; m]];
        raw.on_morphisms.insert(
            d.base().morphism_id(mor).into(),
            power.base().morphism_id(target).into(),
        );
    }
    let data = validate_functor(d.base(), power.base(), &raw)?;
    validate_reedy_functor(&d, &power, &data)
}

/// The inclusion of a slice of a product: coordinates listed in `k` stay
/// free, every other coordinate is pinned to its basepoint object.
pub fn slice_inclusion(
    factors: &[&ReedyCategory],
    k: &[usize],
    basepoints: &[(usize, &str)],
) -> Result<ReedyFunctor> {
    for &i in k {
        if i >= factors.len() {
            return Err(Error::PreconditionFailed {
                detail: format!("slice index {i} out of range for {} factors", factors.len()),
            });
        }
    }
    let mut pinned: BTreeMap<usize, usize> = BTreeMap::new();
    for &(i, name) in basepoints {
        if i >= factors.len() {
            return Err(Error::PreconditionFailed {
                detail: format!(
                    "basepoint index {i} out of range for {} factors",
                    factors.len()
                ),
            });
        }
        let o = factors[i]
            .base()
            .object_index(name)
            .ok_or_else(|| Error::DanglingReference {
                context: format!("basepoint for factor {i}"),
                missing: name.into(),
            })?;
        pinned.insert(i, o);
    }
    for i in 0..factors.len() {
        let free = k.contains(&i);
        if free && pinned.contains_key(&i) {
            return Err(Error::PreconditionFailed {
                detail: format!("factor {i} is both free and pinned"),
            });
        }
        if !free && !pinned.contains_key(&i) {
            return Err(Error::PreconditionFailed {
                detail: format!("factor {i} needs a basepoint"),
            });
        }
    }

    let free: Vec<&ReedyCategory> = k.iter().map(|&i| factors[i]).collect();
    let (source, src_structure) = product_reedy_many(&free)?;
    let (target, tgt_structure) = product_reedy_many(factors)?;

    let fill = |components: &[usize], identity_base: bool| -> Vec<usize> {
        let mut full = Vec::with_capacity(factors.len());
        for i in 0..factors.len() {
            if let Some(pos) = k.iter().position(|&j| j == i) {
                full.push(components[pos]);
            } else {
                // Identity morphisms sit in the slots of their objects, so
                // the same index works for both roles.
                let _ = identity_base;
                full.push(pinned[&i]);
            }
        }
        full
    };

    let mut raw = RawFunctor::default();
    for o in 0..source.base().object_count() {
        let full = fill(&src_structure.object_components[o], false);
        raw.on_objects.insert(
            source.base().object_id(o).into(),
            target.base().object_id(tgt_structure.object_index[&full]).into(),
        );
    }
    for m in source.base().non_identity_morphisms() {
        let full = fill(&src_structure.morphism_components[m], true);
        raw.on_morphisms.insert(
            source.base().morphism_id(m).into(),
            target
                .base()
                .morphism_id(tgt_structure.morphism_index[&full])
                .into(),
        );
    }
    let data = validate_functor(source.base(), target.base(), &raw)?;
    validate_reedy_functor(&source, &target, &data)
}

/// The commuting square with a doubled diagonal: objects alpha, gamma,
/// delta, beta of degrees 2, 1, 1, 0, maps p: alpha -> gamma,
/// q: gamma -> beta, r: alpha -> delta, s: delta -> beta and the common
/// composite qp = sr, all inverse. Returns the square together with the
/// inclusion of its full subcategory on {alpha, gamma, delta}.
pub fn example_square() -> Result<(ReedyCategory, ReedyFunctor)> {
    let mor = |id: &str, src: &str, dst: &str| RawMorphism {
        id: id.into(),
        src: src.into(),
        dst: dst.into(),
    };
    let raw = RawCategory {
        objects: vec!["alpha".into(), "gamma".into(), "delta".into(), "beta".into()],
        morphisms: vec![
            mor("p", "alpha", "gamma"),
            mor("q", "gamma", "beta"),
            mor("r", "alpha", "delta"),
            mor("s", "delta", "beta"),
            mor("qp", "alpha", "beta"),
        ],
        compositions: vec![
            RawComposition {
                first: "p".into(),
                then: "q".into(),
                equals: "qp".into(),
            },
            RawComposition {
                first: "r".into(),
                then: "s".into(),
                equals: "qp".into(),
            },
        ],
    };
    let base = validate_category(&raw)?;
    let square = validate_reedy(
        &base,
        &RawReedy {
            degrees: [
                ("alpha".to_string(), 2),
                ("gamma".to_string(), 1),
                ("delta".to_string(), 1),
                ("beta".to_string(), 0),
            ]
            .into(),
            direct: Default::default(),
            inverse: ["p", "q", "r", "s", "qp"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        },
    )?;

    let sub = base.full_subcategory(&["alpha", "gamma", "delta"])?;
    let punctured = validate_reedy(
        &sub,
        &RawReedy {
            degrees: [
                ("alpha".to_string(), 2),
                ("gamma".to_string(), 1),
                ("delta".to_string(), 1),
            ]
            .into(),
            direct: Default::default(),
            inverse: ["p".to_string(), "r".to_string()].into(),
        },
    )?;
    let mut inc = RawFunctor::default();
    for o in sub.objects() {
        inc.on_objects.insert(o.clone(), o.clone());
    }
    inc.on_morphisms.insert("p".into(), "p".into());
    inc.on_morphisms.insert("r".into(), "r".into());
    let data = validate_functor(punctured.base(), square.base(), &inc)?;
    let functor = validate_reedy_functor(&punctured, &square, &data)?;
    Ok((square, functor))
}

/// A five-object tower of inverse maps collapsing onto a single inverse
/// arrow: the three top objects land on the source, the two bottom ones on
/// the target, and only the maps crossing between the groups survive.
pub fn collapse_tower() -> Result<ReedyFunctor> {
    let mor = |id: &str, src: &str, dst: &str| RawMorphism {
        id: id.into(),
        src: src.into(),
        dst: dst.into(),
    };
    let comp = |first: &str, then: &str, equals: &str| RawComposition {
        first: first.into(),
        then: then.into(),
        equals: equals.into(),
    };
    let raw = RawCategory {
        objects: vec![
            "alpha".into(),
            "beta".into(),
            "gamma".into(),
            "delta".into(),
            "epsilon".into(),
        ],
        morphisms: vec![
            mor("ab", "alpha", "beta"),
            mor("ag", "alpha", "gamma"),
            mor("ad", "alpha", "delta"),
            mor("ae", "alpha", "epsilon"),
            mor("bg", "beta", "gamma"),
            mor("be", "beta", "epsilon"),
            mor("ge", "gamma", "epsilon"),
            mor("de", "delta", "epsilon"),
        ],
        compositions: vec![
            comp("ab", "bg", "ag"),
            comp("ab", "be", "ae"),
            comp("ag", "ge", "ae"),
            comp("ad", "de", "ae"),
            comp("bg", "ge", "be"),
        ],
    };
    let base = validate_category(&raw)?;
    let tower = validate_reedy(
        &base,
        &RawReedy {
            degrees: [
                ("alpha".to_string(), 4),
                ("beta".to_string(), 3),
                ("gamma".to_string(), 2),
                ("delta".to_string(), 1),
                ("epsilon".to_string(), 0),
            ]
            .into(),
            direct: Default::default(),
            inverse: ["ab", "ag", "ad", "ae", "bg", "be", "ge", "de"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        },
    )?;

    let arrow_raw = RawCategory {
        objects: vec!["a".into(), "b".into()],
        morphisms: vec![mor("f", "a", "b")],
        compositions: vec![],
    };
    let arrow = validate_reedy(
        &validate_category(&arrow_raw)?,
        &RawReedy {
            degrees: [("a".to_string(), 1), ("b".to_string(), 0)].into(),
            direct: Default::default(),
            inverse: ["f".to_string()].into(),
        },
    )?;

    let mut raw_f = RawFunctor::default();
    for (o, img) in [
        ("alpha", "a"),
        ("beta", "a"),
        ("gamma", "a"),
        ("delta", "b"),
        ("epsilon", "b"),
    ] {
        raw_f.on_objects.insert(o.into(), img.into());
    }
    for (m, img) in [
        ("ab", "id:a"),
        ("ag", "id:a"),
        ("bg", "id:a"),
        ("de", "id:b"),
        ("ad", "f"),
        ("ae", "f"),
        ("be", "f"),
        ("ge", "f"),
    ] {
        raw_f.on_morphisms.insert(m.into(), img.into());
    }
    let data = validate_functor(tower.base(), arrow.base(), &raw_f)?;
    validate_reedy_functor(&tower, &arrow, &data)
}

/// The inclusion of the degree-at-most-`n` part.
pub fn truncation_inclusion(r: &ReedyCategory, n: u32) -> Result<ReedyFunctor> {
    let (trunc, data) = truncate(r, n)?;
    validate_reedy_functor(&trunc, r, &data)
}

/// The functor collapsing everything onto a one-object category.
pub fn collapse_to_point(r: &ReedyCategory) -> Result<ReedyFunctor> {
    let point = validate_reedy(
        &validate_category(&RawCategory {
            objects: vec!["*".into()],
            ..Default::default()
        })?,
        &RawReedy {
            degrees: [("*".to_string(), 0)].into(),
            ..Default::default()
        },
    )?;
    let mut raw = RawFunctor::default();
    for o in r.base().objects() {
        raw.on_objects.insert(o.clone(), "*".into());
    }
    for m in r.base().non_identity_morphisms() {
        raw.on_morphisms
            .insert(r.base().morphism_id(m).into(), "id:*".into());
    }
    let data = validate_functor(r.base(), point.base(), &raw)?;
    validate_reedy_functor(r, &point, &data)
}

/// The standing suite of named functors used by the verification runs.
pub fn catalog_functors() -> Result<Vec<(String, ReedyFunctor)>> {
    let d1 = delta_truncated(1)?;
    let d2 = delta_truncated(2)?;
    let d1_sq = power_reedy(&d1, 2)?;
    let mut out = vec![
        ("example-square".to_string(), example_square()?.1),
        ("collapse-tower".to_string(), collapse_tower()?),
        ("truncation-delta2-at-1".to_string(), truncation_inclusion(&d2, 1)?),
        ("truncation-delta2-at-0".to_string(), truncation_inclusion(&d2, 0)?),
        (
            "truncation-delta1-square-at-1".to_string(),
            truncation_inclusion(&d1_sq, 1)?,
        ),
        ("rest-delta2".to_string(), delta_rest_truncated(2)?.1),
        ("diagonal-delta1-m2".to_string(), diagonal_functor(1, 2)?),
        ("diagonal-delta2-m2".to_string(), diagonal_functor(2, 2)?),
        ("collapse-delta1-to-point".to_string(), collapse_to_point(&d1)?),
    ];
    out.push((
        "slice-delta2-k1-base0".to_string(),
        slice_inclusion(&[&d2, &d2], &[1], &[(0, "[0]")])?,
    ));
    out.push((
        "slice-delta1-k0-base1".to_string(),
        slice_inclusion(&[&d1, &d1], &[0], &[(1, "[1]")])?,
    ));
    Ok(out)
}

/// Bounds for the random generators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SizeBounds {
    pub max_objects: usize,
    pub max_morphisms: usize,
    pub max_degree: u32,
}

impl Default for SizeBounds {
    fn default() -> SizeBounds {
        SizeBounds {
            max_objects: 7,
            max_morphisms: 60,
            max_degree: 4,
        }
    }
}

const GENERATION_RETRIES: u32 = 400;

struct ThinCandidate {
    raw: RawCategory,
    reedy: RawReedy,
    degrees: Vec<u32>,
    reach_all: Vec<Vec<bool>>,
    reach_down: Vec<Vec<bool>>,
}

fn thin_object(i: usize) -> String {
    format!("o{i}")
}

fn thin_morphism(i: usize, j: usize) -> String {
    format!("o{i}>o{j}")
}

/// Draw a thin candidate: a DAG of degree-monotone edges closed under
/// reachability, with one morphism per reachable pair. Strictly descending
/// pairs become inverse, strictly ascending ones direct, and mixed-path
/// pairs are left general; the Reedy validator then rules on whether the
/// general pairs have the unique valley they need.
fn random_thin_candidate(rng: &mut ChaCha8Rng, bounds: &SizeBounds) -> ThinCandidate {
    let n = rng.gen_range(2..=bounds.max_objects.max(2));
    let degrees: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=bounds.max_degree)).collect();
    let p = (1.6 / n as f64).min(0.9);

    let mut down = vec![vec![false; n]; n];
    let mut up = vec![vec![false; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if degrees[i] == degrees[j] || !rng.gen_bool(p) {
                continue;
            }
            if degrees[i] > degrees[j] {
                down[i][j] = true;
            } else {
                up[i][j] = true;
            }
        }
    }

    thin_candidate_from(degrees, down, up)
}

/// Close an upper-triangular DAG under reachability and list one
/// morphism per reachable pair, plus the full composition table.
fn thin_candidate_from(
    degrees: Vec<u32>,
    down: Vec<Vec<bool>>,
    up: Vec<Vec<bool>>,
) -> ThinCandidate {
    let n = degrees.len();
    let closure = |edges: &dyn Fn(usize, usize) -> bool| -> Vec<Vec<bool>> {
        let mut reach = vec![vec![false; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                reach[i][j] = edges(i, j);
            }
        }
        // Edges only point from lower to higher index, so one ascending
        // sweep per middle vertex closes the relation.
        for m in 0..n {
            for i in 0..m {
                if reach[i][m] {
                    for j in (m + 1)..n {
                        if reach[m][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        reach
    };
    let reach_down = closure(&|i, j| down[i][j]);
    let reach_up = closure(&|i, j| up[i][j]);
    let reach_all = closure(&|i, j| down[i][j] || up[i][j]);

    let mut raw = RawCategory::default();
    let mut reedy = RawReedy::default();
    for i in 0..n {
        raw.objects.push(thin_object(i));
        reedy.degrees.insert(thin_object(i), degrees[i]);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !reach_all[i][j] {
                continue;
            }
            raw.morphisms.push(RawMorphism {
                id: thin_morphism(i, j),
                src: thin_object(i),
                dst: thin_object(j),
            });
            if reach_down[i][j] {
                reedy.inverse.insert(thin_morphism(i, j));
            } else if reach_up[i][j] {
                reedy.direct.insert(thin_morphism(i, j));
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !reach_all[i][j] {
                continue;
            }
            for l in (j + 1)..n {
                if reach_all[j][l] {
                    raw.compositions.push(RawComposition {
                        first: thin_morphism(i, j),
                        then: thin_morphism(j, l),
                        equals: thin_morphism(i, l),
                    });
                }
            }
        }
    }
    ThinCandidate {
        raw,
        reedy,
        degrees,
        reach_all,
        reach_down,
    }
}

fn try_thin_reedy(rng: &mut ChaCha8Rng, bounds: &SizeBounds) -> Option<(ReedyCategory, ThinCandidate)> {
    let candidate = random_thin_candidate(rng, bounds);
    if candidate.raw.morphisms.len() + candidate.raw.objects.len() > bounds.max_morphisms {
        return None;
    }
    let base = validate_category(&candidate.raw).ok()?;
    let reedy = validate_reedy(&base, &candidate.reedy).ok()?;
    Some((reedy, candidate))
}

/// A random finite Reedy category, reproducible from the seed.
pub fn random_reedy(seed: u64, bounds: &SizeBounds) -> Result<ReedyCategory> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GENERATION_RETRIES {
        if let Some((reedy, _)) = try_thin_reedy(&mut rng, bounds) {
            return Ok(reedy);
        }
    }
    Err(Error::GenerationFailed {
        seed,
        attempts: GENERATION_RETRIES,
    })
}

fn try_inclusion_functor(
    rng: &mut ChaCha8Rng,
    bounds: &SizeBounds,
) -> Option<ReedyFunctor> {
    let (target, _) = try_thin_reedy(rng, bounds)?;
    let base = target.base();
    let mut kept: Vec<&str> = Vec::new();
    for o in 0..base.object_count() {
        if rng.gen_bool(0.7) {
            kept.push(base.object_id(o));
        }
    }
    if kept.is_empty() {
        kept.push(base.object_id(0));
    }
    full_inclusion(&target, &kept)
}

/// A punctured fan: one top object over `k ≥ 2` middle objects, everything
/// collapsing onto a single bottom object by inverse morphisms, with a
/// sprinkling of inverse edges among the middles; the inclusion then omits
/// the bottom object. The factorization category over the top-to-bottom
/// composite has the middles' connectivity as its components — sometimes
/// one, often several — so the random suite sees both fibering verdicts.
fn try_puncture_functor(rng: &mut ChaCha8Rng, bounds: &SizeBounds) -> Option<ReedyFunctor> {
    let k = rng.gen_range(2..=3usize);
    let n = k + 2;
    let bottom = n - 1;

    let mut degrees = vec![0u32; n];
    degrees[0] = bounds.max_degree.max(3);
    for i in 1..=k {
        degrees[i] = rng.gen_range(1..=2);
    }
    // Descending middle degrees keep candidate edges upper-triangular.
    degrees[1..=k].sort_unstable_by(|a, b| b.cmp(a));

    let mut down = vec![vec![false; n]; n];
    let up = vec![vec![false; n]; n];
    for i in 1..=k {
        down[0][i] = true;
        down[i][bottom] = true;
    }
    for i in 1..=k {
        for j in (i + 1)..=k {
            if degrees[i] > degrees[j] && rng.gen_bool(0.4) {
                down[i][j] = true;
            }
        }
    }

    let candidate = thin_candidate_from(degrees, down, up);
    let base = validate_category(&candidate.raw).ok()?;
    let target = validate_reedy(&base, &candidate.reedy).ok()?;
    let kept: Vec<&str> = (0..bottom).map(|o| base.object_id(o)).collect();
    let g = full_inclusion(&target, &kept)?;
    // Half the time hand out the dual instance, so cofibering failures are
    // as well represented as fibering ones.
    Some(if rng.gen_bool(0.5) { g.opposite() } else { g })
}

fn full_inclusion(target: &ReedyCategory, kept: &[&str]) -> Option<ReedyFunctor> {
    let base = target.base();
    let sub = base.full_subcategory(kept).ok()?;
    let raw = target.to_raw_reedy();
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
    let source = validate_reedy(&sub, &restricted).ok()?;
    let mut inc = RawFunctor::default();
    for o in sub.objects() {
        inc.on_objects.insert(o.clone(), o.clone());
    }
    for m in sub.non_identity_morphisms() {
        let id = sub.morphism_id(m);
        inc.on_morphisms.insert(id.into(), id.into());
    }
    let data = validate_functor(&sub, base, &inc).ok()?;
    validate_reedy_functor(&source, target, &data).ok()
}

fn try_satellite_functor(rng: &mut ChaCha8Rng, bounds: &SizeBounds) -> Option<ReedyFunctor> {
    let (target, candidate) = try_thin_reedy(rng, bounds)?;
    let base = target.base();
    let n = base.object_count();
    let d0 = rng.gen_range(0..n);
    let satellites = rng.gen_range(1..=2usize);

    // Extend the base category with fresh top-degree objects collapsing
    // onto d0; each satellite sees d0 and everything d0 reaches. A map
    // s -> x keeps the class of d0 -> x when that is inverse and is left
    // general otherwise, so the collapse preserves both subcategories.
    let mut raw = candidate.raw.clone();
    let mut reedy = candidate.reedy.clone();
    let top = candidate.degrees.iter().copied().max().unwrap_or(0) + 1;
    let reach: Vec<usize> = (0..n).filter(|&x| candidate.reach_all[d0][x]).collect();

    let sat_name = |t: usize| format!("s{t}");
    let sat_mor = |t: usize, x: usize| format!("s{t}>o{x}");
    for t in 0..satellites {
        raw.objects.push(sat_name(t));
        reedy.degrees.insert(sat_name(t), top);
        raw.morphisms.push(RawMorphism {
            id: sat_mor(t, d0),
            src: sat_name(t),
            dst: thin_object(d0),
        });
        reedy.inverse.insert(sat_mor(t, d0));
        for &x in &reach {
            raw.morphisms.push(RawMorphism {
                id: sat_mor(t, x),
                src: sat_name(t),
                dst: thin_object(x),
            });
            if candidate.reach_down[d0][x] {
                reedy.inverse.insert(sat_mor(t, x));
            }
        }
        for &x in &reach {
            raw.compositions.push(RawComposition {
                first: sat_mor(t, d0),
                then: thin_morphism(d0, x),
                equals: sat_mor(t, x),
            });
            for &y in &reach {
                if x < y && candidate.reach_all[x][y] {
                    raw.compositions.push(RawComposition {
                        first: sat_mor(t, x),
                        then: thin_morphism(x, y),
                        equals: sat_mor(t, y),
                    });
                }
            }
        }
    }
    if raw.morphisms.len() + raw.objects.len() > bounds.max_morphisms {
        return None;
    }
    let big = validate_category(&raw).ok()?;
    let source = validate_reedy(&big, &reedy).ok()?;

    let mut raw_f = RawFunctor::default();
    for o in base.objects() {
        raw_f.on_objects.insert(o.clone(), o.clone());
    }
    for m in base.non_identity_morphisms() {
        let id = base.morphism_id(m);
        raw_f.on_morphisms.insert(id.into(), id.into());
    }
    for t in 0..satellites {
        raw_f.on_objects.insert(sat_name(t), thin_object(d0));
        raw_f
            .on_morphisms
            .insert(sat_mor(t, d0), format!("id:{}", thin_object(d0)));
        for &x in &reach {
            raw_f.on_morphisms.insert(sat_mor(t, x), thin_morphism(d0, x));
        }
    }
    let data = validate_functor(&big, base, &raw_f).ok()?;
    validate_reedy_functor(&source, &target, &data).ok()
}

/// A random Reedy functor: either a full-subcategory inclusion or a
/// satellite collapse (fresh top objects dropped onto an existing one, so
/// the kernel there is nonempty). Reproducible from the seed.
pub fn random_reedy_functor(seed: u64, bounds: &SizeBounds) -> Result<ReedyFunctor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GENERATION_RETRIES {
        let functor = match rng.gen_range(0..3u8) {
            0 => try_inclusion_functor(&mut rng, bounds),
            1 => try_satellite_functor(&mut rng, bounds),
            _ => try_puncture_functor(&mut rng, bounds),
        };
        if let Some(g) = functor {
            return Ok(g);
        }
    }
    Err(Error::GenerationFailed {
        seed,
        attempts: GENERATION_RETRIES,
    })
}

/// A random diagram of finite sets on the given shape: a sum of
/// representables with a few randomly generated identifications glued in.
/// Always functorial by construction, and validated before returning.
pub fn random_diagram(
    seed: u64,
    shape: &FiniteCategory,
    max_summands: usize,
    max_glue: usize,
) -> Result<SetDiagram> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = shape.object_count();
    if n == 0 {
        return validate_diagram(shape, &RawDiagram::default());
    }
    let count = rng.gen_range(0..=max_summands);
    let picks: Vec<String> = (0..count)
        .map(|_| shape.object_id(rng.gen_range(0..n)).to_string())
        .collect();
    let pick_refs: Vec<&str> = picks.iter().map(|s| s.as_str()).collect();
    let free = sum_of_representables(shape, &pick_refs)?;

    // Union-find over all elements, objects offset one after another.
    let mut offsets = vec![0usize; n + 1];
    for o in 0..n {
        offsets[o + 1] = offsets[o] + free.set_len(o);
    }
    let total = offsets[n];
    let mut uf = UnionFind::new(total);
    let glue = rng.gen_range(0..=max_glue);
    let mut pending: Vec<usize> = Vec::new();
    for _ in 0..glue {
        let candidates: Vec<usize> = (0..n).filter(|&o| free.set_len(o) >= 2).collect();
        if candidates.is_empty() {
            break;
        }
        let o = candidates[rng.gen_range(0..candidates.len())];
        let a = rng.gen_range(0..free.set_len(o));
        let b = rng.gen_range(0..free.set_len(o));
        if uf.union(offsets[o] + a, offsets[o] + b) {
            pending.push(offsets[o] + a);
        }
    }
    // Close under the action: identified elements must stay identified
    // after applying every morphism out of their object.
    while let Some(seed_elem) = pending.pop() {
        let o = (0..n).rfind(|&o| offsets[o] <= seed_elem).unwrap();
        for other in offsets[o]..offsets[o + 1] {
            if other == seed_elem || !uf.same(seed_elem, other) {
                continue;
            }
            for m in shape.non_identity_morphisms() {
                if shape.src(m) != o {
                    continue;
                }
                let d = shape.dst(m);
                let ia = offsets[d] + free.apply(m, (seed_elem - offsets[o]) as u32) as usize;
                let ib = offsets[d] + free.apply(m, (other - offsets[o]) as u32) as usize;
                if uf.union(ia, ib) {
                    pending.push(ia);
                }
            }
        }
    }

    let mut class_name: HashMap<usize, String> = HashMap::new();
    for o in 0..n {
        for e in 0..free.set_len(o) {
            let root = uf.find(offsets[o] + e);
            class_name
                .entry(root)
                .or_insert_with(|| free.set(o)[e].clone());
        }
    }
    let mut raw = RawDiagram::default();
    for o in 0..n {
        let mut elems: Vec<String> = Vec::new();
        let mut seen: HashMap<usize, ()> = HashMap::new();
        for e in 0..free.set_len(o) {
            let root = uf.find(offsets[o] + e);
            if seen.insert(root, ()).is_none() {
                elems.push(class_name[&root].clone());
            }
        }
        raw.sets.insert(shape.object_id(o).to_string(), elems);
    }
    for m in shape.non_identity_morphisms() {
        let o = shape.src(m);
        let d = shape.dst(m);
        let mut entries: BTreeMap<String, String> = BTreeMap::new();
        for e in 0..free.set_len(o) {
            let root = uf.find(offsets[o] + e);
            let img = free.apply(m, e as u32) as usize;
            let img_root = uf.find(offsets[d] + img);
            entries.insert(class_name[&root].clone(), class_name[&img_root].clone());
        }
        raw.functions
            .insert(shape.morphism_id(m).to_string(), entries);
    }
    validate_diagram(shape, &raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quillen::{g_kernel, is_cofibering, is_fibering};
    use crate::reedy::matching_category;
    use crate::setdiag::{matching_iso_check, validate_nat, NatTrans};

    fn binomial(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        let mut out = 1usize;
        for i in 0..k {
            out = out * (n - i) / (i + 1);
        }
        out
    }

    #[test]
    fn delta_counts_match_the_binomial_formula() {
        assert_eq!(delta_truncated(0).unwrap().base().morphism_count(), 1);
        assert_eq!(delta_truncated(1).unwrap().base().morphism_count(), 7);
        let d2 = delta_truncated(2).unwrap();
        assert_eq!(d2.base().morphism_count(), 31);
        for a in 0..=2usize {
            for b in 0..=2usize {
                let i = d2.base().object_index(&ordinal_name(a)).unwrap();
                let j = d2.base().object_index(&ordinal_name(b)).unwrap();
                assert_eq!(d2.base().hom(i, j).len(), binomial(a + b + 1, a + 1));
            }
        }
        let one = d2.base().object_index("[1]").unwrap();
        let two = d2.base().object_index("[2]").unwrap();
        assert_eq!(d2.base().hom(one, two).len(), 6);
    }

    #[test]
    fn delta_classes_follow_injectivity_and_surjectivity() {
        let d2 = delta_truncated(2).unwrap();
        let b = d2.base();
        let surj = b.morphism_index("d[2->1]:(0,0,1)").unwrap();
        assert!(d2.is_inverse(surj));
        let inj = b.morphism_index("d[1->2]:(0,2)").unwrap();
        assert!(d2.is_direct(inj));
        let neither = b.morphism_index("d[2->2]:(0,0,2)").unwrap();
        assert!(!d2.is_direct(neither) && !d2.is_inverse(neither));
    }

    #[test]
    fn delta_rest_counts_and_empty_matching_categories() {
        let (rest, inclusion) = delta_rest_truncated(2).unwrap();
        assert_eq!(rest.base().morphism_count(), 11);
        for o in rest.base().objects() {
            let mat = matching_category(&rest, o).unwrap();
            assert_eq!(mat.category.object_count(), 0);
        }
        assert_eq!(inclusion.source().base().morphism_count(), 11);
        assert_eq!(inclusion.target().base().morphism_count(), 31);
    }

    #[test]
    fn powers_multiply_counts_and_add_degrees() {
        let d1 = delta_truncated(1).unwrap();
        let sq = power_reedy(&d1, 2).unwrap();
        assert_eq!(sq.base().morphism_count(), 49);
        let top = sq.base().object_index("[1]×[1]").unwrap();
        assert_eq!(sq.degree(top), 2);
    }

    #[test]
    fn diagonal_doubles_coordinates() {
        let diag = diagonal_functor(1, 2).unwrap();
        let src = diag.source().base();
        let tgt = diag.target().base();
        let one = src.object_index("[1]").unwrap();
        assert_eq!(tgt.object_id(diag.object_image(one)), "[1]×[1]");
        let m = src.morphism_index("d[0->1]:(0)").unwrap();
        assert_eq!(
            tgt.morphism_id(diag.morphism_image(m)),
            "d[0->1]:(0)×d[0->1]:(0)"
        );

        let identity_like = diagonal_functor(1, 1).unwrap();
        assert_eq!(identity_like.source().base(), identity_like.target().base());
    }

    #[test]
    fn slices_pin_the_complementary_coordinates() {
        let d1 = delta_truncated(1).unwrap();
        let slice = slice_inclusion(&[&d1, &d1], &[1], &[(0, "[0]")]).unwrap();
        let src = slice.source().base();
        let tgt = slice.target().base();
        assert_eq!(src.morphism_count(), 7);
        let one = src.object_index("[1]").unwrap();
        assert_eq!(tgt.object_id(slice.object_image(one)), "[0]×[1]");
        let m = src.morphism_index("d[0->1]:(0)").unwrap();
        assert_eq!(
            tgt.morphism_id(slice.morphism_image(m)),
            "id:[0]×d[0->1]:(0)"
        );

        assert!(slice_inclusion(&[&d1, &d1], &[0], &[]).is_err());
        assert!(slice_inclusion(&[&d1, &d1], &[0], &[(1, "[9]")]).is_err());
    }

    #[test]
    fn example_square_reproduces_the_known_verdicts() {
        let (square, inclusion) = example_square().unwrap();
        assert_eq!(square.base().morphism_count(), 9);
        assert_eq!(inclusion.source().base().morphism_count(), 5);
        let fib = is_fibering(&inclusion).unwrap();
        assert!(!fib.holds);
        assert!(is_cofibering(&inclusion).unwrap().holds);
    }

    #[test]
    fn collapse_tower_matches_the_worked_example() {
        let g = collapse_tower().unwrap();
        assert_eq!(g.source().base().object_count(), 5);
        assert!(is_fibering(&g).unwrap().holds);

        let kernel = g_kernel(&g, "alpha").unwrap();
        assert_eq!(kernel.object_arrows, vec!["ab".to_string(), "ag".to_string()]);

        // The induced matching limit at alpha is the value at a.
        let x = random_diagram(11, g.target().base(), 3, 1).unwrap();
        let a = g.target().base().object_index("a").unwrap();
        if x.set_len(a) > 0 {
            let report = matching_iso_check(&g, &x, "alpha").unwrap();
            assert!(report.bijective);
            assert_eq!(report.value_size, x.set_len(a));
        }
    }

    #[test]
    fn catalog_suite_builds() {
        let suite = catalog_functors().unwrap();
        assert_eq!(suite.len(), 11);
        let names: Vec<&str> = suite.iter().map(|(n, _)| n.as_str()).collect();
        assert!(names.contains(&"example-square"));
        assert!(names.contains(&"diagonal-delta2-m2"));
    }

    #[test]
    fn random_generation_is_reproducible_and_valid() {
        let bounds = SizeBounds::default();
        for seed in 0..25 {
            let g = random_reedy_functor(seed, &bounds).unwrap();
            assert!(g.source().base().morphism_count() <= bounds.max_morphisms);
            let again = random_reedy_functor(seed, &bounds).unwrap();
            assert_eq!(
                serde_json::to_string(&g.functor().to_raw()).unwrap(),
                serde_json::to_string(&again.functor().to_raw()).unwrap()
            );
            assert_eq!(
                serde_json::to_string(&g.source().to_raw_reedy()).unwrap(),
                serde_json::to_string(&again.source().to_raw_reedy()).unwrap()
            );
        }
        let r = random_reedy(3, &bounds).unwrap();
        assert_eq!(
            serde_json::to_string(&r.to_raw_reedy()).unwrap(),
            serde_json::to_string(&random_reedy(3, &bounds).unwrap().to_raw_reedy()).unwrap()
        );
    }

    #[test]
    fn satellite_functors_show_up_with_nonempty_kernels() {
        let bounds = SizeBounds::default();
        let mut found = 0;
        for seed in 0..40 {
            let g = random_reedy_functor(seed, &bounds).unwrap();
            let base = g.source().base();
            for o in 0..base.object_count() {
                let kernel = g_kernel(&g, base.object_id(o)).unwrap();
                if kernel.category.object_count() > 0 {
                    found += 1;
                    break;
                }
            }
        }
        assert!(found >= 5, "only {found} kernels in 40 seeds");
    }

    #[test]
    fn random_diagrams_are_functorial_and_reproducible() {
        let (square, _) = example_square().unwrap();
        for seed in 0..10 {
            let x = random_diagram(seed, square.base(), 3, 2).unwrap();
            let y = random_diagram(seed, square.base(), 3, 2).unwrap();
            assert_eq!(
                serde_json::to_string(&x.to_raw()).unwrap(),
                serde_json::to_string(&y.to_raw()).unwrap()
            );
            // The identity family is natural, which re-checks shape wiring.
            let t = NatTrans {
                components: (0..4)
                    .map(|o| (0..x.set_len(o) as u32).collect())
                    .collect(),
            };
            let raw: crate::setdiag::RawNatTrans = (0..4)
                .map(|o| {
                    (
                        square.base().object_id(o).to_string(),
                        x.set(o)
                            .iter()
                            .map(|e| (e.clone(), e.clone()))
                            .collect(),
                    )
                })
                .collect();
            let _ = t;
            assert!(validate_nat(&x, &x, &raw).is_ok());
        }
    }
}
