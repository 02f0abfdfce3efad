//! On-disk JSON formats for categories, functors, and set-valued diagrams.
//!
//! A category file bundles the underlying category with optional Reedy
//! structure: objects may carry a `degree` and morphisms a `class`. Either
//! every object has a degree (the file describes a Reedy category) or none
//! does (a plain category, in which only the class `general` is allowed).
//! Functor and diagram files refer to category files by path, resolved
//! relative to the referring file's own directory.
//!
//! Writers emit pretty-printed JSON with sorted map keys and a trailing
//! newline, so repeated exports of the same value are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::{
    validate_category, validate_functor, FiniteCategory, FunctorData, RawCategory,
    RawComposition, RawFunctor, RawMorphism,
};
use crate::quillen::{validate_reedy_functor, ReedyFunctor};
use crate::reedy::{validate_reedy, RawReedy, ReedyCategory};
use crate::setdiag::{validate_diagram, RawDiagram, SetDiagram};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileObject {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileMorphism {
    pub id: String,
    pub src: String,
    pub dst: String,
    #[serde(default = "general_class")]
    pub class: String,
}

fn general_class() -> String {
    "general".into()
}

/// A category file; identities are never listed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryFile {
    pub objects: Vec<FileObject>,
    pub morphisms: Vec<FileMorphism>,
    #[serde(default)]
    pub composition: Vec<RawComposition>,
}

/// A functor file; `source` and `target` are category file paths relative
/// to the directory holding the functor file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctorFile {
    pub source: String,
    pub target: String,
    pub on_objects: std::collections::BTreeMap<String, String>,
    pub on_morphisms: std::collections::BTreeMap<String, String>,
}

/// A diagram file; `category` names the shape, relative to the diagram
/// file's directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramFile {
    pub category: String,
    #[serde(flatten)]
    pub data: RawDiagram,
}

#[derive(Debug, Clone)]
pub enum LoadedCategory {
    Plain(FiniteCategory),
    Reedy(ReedyCategory),
}

impl LoadedCategory {
    pub fn base(&self) -> &FiniteCategory {
        match self {
            LoadedCategory::Plain(c) => c,
            LoadedCategory::Reedy(r) => r.base(),
        }
    }

    pub fn reedy(&self) -> Option<&ReedyCategory> {
        match self {
            LoadedCategory::Plain(_) => None,
            LoadedCategory::Reedy(r) => Some(r),
        }
    }
}

#[derive(Debug, Clone)]
pub enum LoadedFunctor {
    Plain(FunctorData),
    Reedy(ReedyFunctor),
}

impl LoadedFunctor {
    pub fn data(&self) -> &FunctorData {
        match self {
            LoadedFunctor::Plain(d) => d,
            LoadedFunctor::Reedy(g) => g.functor(),
        }
    }

    pub fn reedy(&self) -> Option<&ReedyFunctor> {
        match self {
            LoadedFunctor::Plain(_) => None,
            LoadedFunctor::Reedy(g) => Some(g),
        }
    }
}

/// Validate the contents of a category file.
pub fn build_category(file: &CategoryFile) -> Result<LoadedCategory> {
    let raw = RawCategory {
        objects: file.objects.iter().map(|o| o.id.clone()).collect(),
        morphisms: file
            .morphisms
            .iter()
            .map(|m| RawMorphism {
                id: m.id.clone(),
                src: m.src.clone(),
                dst: m.dst.clone(),
            })
            .collect(),
        compositions: file.composition.clone(),
    };
    let base = validate_category(&raw)?;

    let with_degree = file.objects.iter().filter(|o| o.degree.is_some()).count();
    if with_degree == 0 {
        if let Some(m) = file.morphisms.iter().find(|m| m.class != "general") {
            return Err(Error::PreconditionFailed {
                detail: format!(
                    "morphism `{}` is classed `{}` but no object carries a degree",
                    m.id, m.class
                ),
            });
        }
        return Ok(LoadedCategory::Plain(base));
    }
    if with_degree < file.objects.len() {
        let gap = file.objects.iter().find(|o| o.degree.is_none()).unwrap();
        return Err(Error::PreconditionFailed {
            detail: format!(
                "object `{}` has no degree while others do; degrees must cover every object or none",
                gap.id
            ),
        });
    }

    let mut reedy = RawReedy::default();
    for o in &file.objects {
        reedy.degrees.insert(o.id.clone(), o.degree.unwrap());
    }
    for m in &file.morphisms {
        match m.class.as_str() {
            "direct" => {
                reedy.direct.insert(m.id.clone());
            }
            "inverse" => {
                reedy.inverse.insert(m.id.clone());
            }
            "general" => {}
            other => {
                return Err(Error::PreconditionFailed {
                    detail: format!(
                        "morphism `{}` has unknown class `{other}` (expected direct, inverse, or general)",
                        m.id
                    ),
                })
            }
        }
    }
    Ok(LoadedCategory::Reedy(validate_reedy(&base, &reedy)?))
}

pub fn parse_category(text: &str) -> Result<LoadedCategory> {
    build_category(&serde_json::from_str(text)?)
}

/// Read a file, naming it in the error when that fails.
pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

pub fn load_category(path: &Path) -> Result<LoadedCategory> {
    parse_category(&read_file(path)?)
}

pub fn load_functor(path: &Path) -> Result<LoadedFunctor> {
    let file: FunctorFile = serde_json::from_str(&read_file(path)?)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let source = load_category(&dir.join(&file.source))?;
    let target = load_category(&dir.join(&file.target))?;
    let raw = RawFunctor {
        on_objects: file.on_objects,
        on_morphisms: file.on_morphisms,
    };
    let data = validate_functor(source.base(), target.base(), &raw)?;
    match (source, target) {
        (LoadedCategory::Reedy(s), LoadedCategory::Reedy(t)) => {
            Ok(LoadedFunctor::Reedy(validate_reedy_functor(&s, &t, &data)?))
        }
        _ => Ok(LoadedFunctor::Plain(data)),
    }
}

pub fn load_diagram(path: &Path) -> Result<(LoadedCategory, SetDiagram)> {
    let file: DiagramFile = serde_json::from_str(&read_file(path)?)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let shape = load_category(&dir.join(&file.category))?;
    let diagram = validate_diagram(shape.base(), &file.data)?;
    Ok((shape, diagram))
}

/// File contents for a plain category: no degrees, all classes `general`.
pub fn plain_category_file(c: &FiniteCategory) -> CategoryFile {
    let raw = c.to_raw();
    CategoryFile {
        objects: raw
            .objects
            .into_iter()
            .map(|id| FileObject { id, degree: None })
            .collect(),
        morphisms: raw
            .morphisms
            .into_iter()
            .map(|m| FileMorphism {
                id: m.id,
                src: m.src,
                dst: m.dst,
                class: general_class(),
            })
            .collect(),
        composition: raw.compositions,
    }
}

/// File contents for a Reedy category.
pub fn category_file(r: &ReedyCategory) -> CategoryFile {
    let mut file = plain_category_file(r.base());
    let reedy = r.to_raw_reedy();
    for o in &mut file.objects {
        o.degree = Some(reedy.degrees[&o.id]);
    }
    for m in &mut file.morphisms {
        if reedy.direct.contains(&m.id) {
            m.class = "direct".into();
        } else if reedy.inverse.contains(&m.id) {
            m.class = "inverse".into();
        }
    }
    file
}

/// File contents for a functor, given the category paths it should cite.
pub fn functor_file(data: &FunctorData, source: &str, target: &str) -> FunctorFile {
    let raw = data.to_raw();
    FunctorFile {
        source: source.into(),
        target: target.into(),
        on_objects: raw.on_objects,
        on_morphisms: raw.on_morphisms,
    }
}

/// File contents for a diagram, given the shape path it should cite.
pub fn diagram_file(diagram: &SetDiagram, category: &str) -> DiagramFile {
    DiagramFile {
        category: category.into(),
        data: diagram.to_raw(),
    }
}

/// Pretty JSON with a trailing newline; byte-stable for a fixed value.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    text
}

pub fn write_category(path: &Path, r: &ReedyCategory) -> Result<()> {
    fs::write(path, canonical_json(&category_file(r)))?;
    Ok(())
}

/// Write `<stem>.source.json`, `<stem>.target.json`, and `<stem>.functor.json`
/// under `dir`; returns the written paths in that order.
pub fn write_functor_files(dir: &Path, stem: &str, g: &ReedyFunctor) -> Result<Vec<PathBuf>> {
    let source_name = format!("{stem}.source.json");
    let target_name = format!("{stem}.target.json");
    let functor_name = format!("{stem}.functor.json");
    let paths = vec![
        dir.join(&source_name),
        dir.join(&target_name),
        dir.join(&functor_name),
    ];
    write_category(&paths[0], g.source())?;
    write_category(&paths[1], g.target())?;
    let file = functor_file(g.functor(), &source_name, &target_name);
    fs::write(&paths[2], canonical_json(&file))?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn scratch_dir(label: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!(
            "reedy-files-{label}-{}",
            std::process::id()
        ));
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn category_round_trip_is_byte_stable() {
        let delta = catalog::delta_truncated(2).unwrap();
        let dir = scratch_dir("cat");
        let path = dir.join("delta2.json");
        write_category(&path, &delta).unwrap();
        let first = fs::read_to_string(&path).unwrap();

        let loaded = load_category(&path).unwrap();
        let reedy = loaded.reedy().expect("degrees present");
        assert_eq!(
            serde_json::to_string(&reedy.base().to_raw()).unwrap(),
            serde_json::to_string(&delta.base().to_raw()).unwrap()
        );
        assert_eq!(reedy.to_raw_reedy(), delta.to_raw_reedy());

        write_category(&path, reedy).unwrap();
        assert_eq!(first, fs::read_to_string(&path).unwrap());
    }

    #[test]
    fn plain_categories_reject_classes_and_partial_degrees() {
        let text = r#"{
            "objects": [{"id": "x"}, {"id": "y"}],
            "morphisms": [{"id": "f", "src": "x", "dst": "y"}],
            "composition": []
        }"#;
        let loaded = parse_category(text).unwrap();
        assert!(loaded.reedy().is_none());
        assert_eq!(loaded.base().morphism_count(), 3);

        let classed = text.replace(r#""dst": "y""#, r#""dst": "y", "class": "inverse""#);
        assert!(parse_category(&classed).is_err());

        let partial = text.replace(r#"{"id": "x"}"#, r#"{"id": "x", "degree": 1}"#);
        assert!(parse_category(&partial).is_err());

        assert!(parse_category("{not json").is_err());
    }

    #[test]
    fn functor_round_trip_preserves_verdicts() {
        let (_, g) = catalog::example_square().unwrap();
        let dir = scratch_dir("fun");
        let paths = write_functor_files(&dir, "square", &g).unwrap();
        let loaded = load_functor(&paths[2]).unwrap();
        let reedy = loaded.reedy().expect("both endpoints carry degrees");
        assert!(!crate::quillen::is_fibering(reedy).unwrap().holds);
        assert!(crate::quillen::is_cofibering(reedy).unwrap().holds);

        // Re-exporting the loaded functor reproduces the bytes.
        let again = write_functor_files(&dir, "square", reedy).unwrap();
        assert_eq!(paths, again);
        let file: FunctorFile =
            serde_json::from_str(&fs::read_to_string(&paths[2]).unwrap()).unwrap();
        assert_eq!(file.on_morphisms["p"], "p");
    }

    #[test]
    fn diagram_files_resolve_relative_paths() {
        let (square, _) = catalog::example_square().unwrap();
        let diagram = crate::setdiag::representable(square.base(), "alpha").unwrap();
        let dir = scratch_dir("diag");
        write_category(&dir.join("shape.json"), &square).unwrap();
        let file = diagram_file(&diagram, "shape.json");
        fs::write(dir.join("repr.json"), canonical_json(&file)).unwrap();

        let (shape, loaded) = load_diagram(&dir.join("repr.json")).unwrap();
        assert!(shape.reedy().is_some());
        assert_eq!(loaded.to_raw(), diagram.to_raw());

        // A dangling category path surfaces as an I/O error.
        let broken = diagram_file(&diagram, "missing.json");
        fs::write(dir.join("broken.json"), canonical_json(&broken)).unwrap();
        assert!(load_diagram(&dir.join("broken.json")).is_err());
    }
}
