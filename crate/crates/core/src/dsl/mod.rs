//! The `.agd` model language: a patch, named algebroids, morphisms,
//! connections, forms, adjustments, pullbacks, extensions and tasks.
//!
//! ```text
//! patch x1 x2 x3
//! algebroid T tangent
//! algebroid E
//!   frame e1 e2 e3
//!   anchor e1: 0, x3, -x2
//!   bracket e1 e2: 0, 0, 1
//! end
//! morphism K: E -> T anchor
//! adjustment adj
//!   E = E
//!   F = T
//!   K = K
//! end
//! task classify: classify adj
//! ```
//!
//! Loading resolves every name after the whole file is read, so
//! declarations may appear in any order.

mod export;
mod run;
mod syntax;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::adjustment::{AdjustmentData, SplittingVariant};
use crate::algebroid::{tangent_algebroid, LieAlgebroid};
use crate::connection::{ETwoFormOnF, FConnection};
use crate::geometry::{BundleMorphism, Section, VectorBundle, VectorField};
use crate::pullback::{lifted_action_fields, Submersion};
use crate::symexpr::{parse_expr, CoordinatePatch, ParseError, ScalarExpr};

pub use export::{export_extension, export_extension_text, ExportError};
pub use run::{build_named_extension, run, Entry, EntryResidual, RunReport};

use syntax::{parse_decls, Decl, DeclKind, Entry as SynEntry, ExtensionSource, Loc, MorphismBody, Src};

/// A load failure with a one-based source position.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LoadError {
    #[error("line {line}, column {column}: {message}")]
    At {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

impl LoadError {
    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        LoadError::At {
            line,
            column,
            message: message.into(),
        }
    }

    fn loc(loc: Loc, message: impl Into<String>) -> Self {
        LoadError::at(loc.line, loc.column, message)
    }

    pub fn line(&self) -> Option<usize> {
        match self {
            LoadError::At { line, .. } => Some(*line),
            LoadError::Io { .. } => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MorphismDecl {
    pub source: String,
    pub target: String,
    pub map: BundleMorphism,
}

#[derive(Clone, Debug)]
pub struct ConnectionDecl {
    pub f: String,
    pub e: String,
    pub nabla: FConnection,
}

#[derive(Clone, Debug)]
pub struct Form2Decl {
    pub f: String,
    pub e: String,
    pub zeta: ETwoFormOnF,
}

/// `λ: F → E` as a morphism of bundles.
#[derive(Clone, Debug)]
pub struct Form1Decl {
    pub f: String,
    pub e: String,
    pub lambda: BundleMorphism,
}

#[derive(Clone, Debug)]
pub struct PullbackDecl {
    pub from: String,
    pub phi: Submersion,
    /// Action fields over the total patch; `None` keeps the lifted anchor.
    pub action: Option<Vec<VectorField>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtensionDecl {
    /// Built from an adjustment or from a pulled-back adjustment.
    From(String),
    Mackenzie {
        f: String,
        e: String,
        nabla: String,
        zeta: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TaskOp {
    VerifyAlgebroid(String),
    VerifyMorphism(String),
    Classify(String),
    CheckCartan(String),
    CheckCovariant(String),
    CheckStrict(String),
    StrictBracket(String),
    Decomposition(String),
    Mym(String),
    BasicFlatness(String),
    BasicIdentities(String),
    Reconstruct(String),
    SplittingChange {
        adjustment: String,
        lambda: String,
        variant: SplittingVariant,
    },
    Extension(String),
    /// Two extensions or algebroids.
    Compare(String, String),
    Pullback(String),
    PullbackRelations(String),
}

#[derive(Clone, Debug)]
pub struct Task {
    pub name: String,
    pub op: TaskOp,
    pub line: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Algebroid,
    Morphism,
    Connection,
    Form2,
    Form1,
    Adjustment,
    Pullback,
    Extension,
    Task,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Algebroid => "an algebroid",
            Kind::Morphism => "a morphism",
            Kind::Connection => "a connection",
            Kind::Form2 => "a form2",
            Kind::Form1 => "a form1",
            Kind::Adjustment => "an adjustment",
            Kind::Pullback => "a pullback",
            Kind::Extension => "an extension",
            Kind::Task => "a task",
        })
    }
}

/// A fully resolved model.
#[derive(Clone, Debug, Default)]
pub struct Model {
    pub patch: Option<CoordinatePatch>,
    pub algebroids: BTreeMap<String, LieAlgebroid>,
    pub morphisms: BTreeMap<String, MorphismDecl>,
    pub connections: BTreeMap<String, ConnectionDecl>,
    pub forms2: BTreeMap<String, Form2Decl>,
    pub forms1: BTreeMap<String, Form1Decl>,
    pub adjustments: BTreeMap<String, AdjustmentData>,
    pub pullbacks: BTreeMap<String, PullbackDecl>,
    pub extensions: BTreeMap<String, ExtensionDecl>,
    /// In declaration order.
    pub tasks: Vec<Task>,
    kinds: BTreeMap<String, Kind>,
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    load_str(&text)
}

pub fn load_str(source: &str) -> Result<Model, LoadError> {
    let decls = parse_decls(source)?;
    let mut model = Model::default();
    for d in &decls {
        if let DeclKind::Patch(names) = &d.kind {
            if model.patch.is_some() {
                return Err(LoadError::loc(d.loc, "a model has exactly one patch"));
            }
            let patch = CoordinatePatch::new(names.iter().map(|s| s.text.clone()))
                .map_err(|e| LoadError::loc(d.loc, e.to_string()))?;
            model.patch = Some(patch);
        }
    }
    for d in &decls {
        let kind = match &d.kind {
            DeclKind::Patch(_) => continue,
            DeclKind::Tangent | DeclKind::Algebroid { .. } => Kind::Algebroid,
            DeclKind::Morphism { .. } => Kind::Morphism,
            DeclKind::Connection { .. } => Kind::Connection,
            DeclKind::Form2 { .. } => Kind::Form2,
            DeclKind::Form1 { .. } => Kind::Form1,
            DeclKind::Adjustment { .. } => Kind::Adjustment,
            DeclKind::Pullback { .. } => Kind::Pullback,
            DeclKind::Extension(_) => Kind::Extension,
            DeclKind::Task { .. } => Kind::Task,
        };
        if model.kinds.insert(d.name.text.clone(), kind).is_some() {
            return Err(LoadError::loc(
                d.name.loc,
                format!("`{}` is declared twice", d.name.text),
            ));
        }
        if kind != Kind::Task && model.patch.is_none() {
            return Err(LoadError::loc(d.loc, "no `patch` declared"));
        }
    }
    let stages: [&dyn Fn(&mut Model, &Decl) -> Result<(), LoadError>; 5] = [
        &Model::add_algebroid,
        &Model::add_map,
        &Model::add_adjustment,
        &Model::add_pullback,
        &Model::add_extension,
    ];
    for stage in stages {
        for d in &decls {
            stage(&mut model, d)?;
        }
    }
    for d in &decls {
        if let DeclKind::Task { op, args } = &d.kind {
            let op = model.task_op(&d.name.text, op, args)?;
            model.tasks.push(Task {
                name: d.name.text.clone(),
                op,
                line: d.loc.line,
            });
        }
    }
    Ok(model)
}

fn expr_error(src: &Src, e: ParseError) -> LoadError {
    let message = match &e {
        ParseError::Syntax { message, .. } => format!("syntax error: {message}"),
        ParseError::UnknownIdentifier { name, .. } => format!("unknown identifier `{name}`"),
        ParseError::NonRational { name, .. } => {
            format!("non-rational function `{name}`: only rational expressions are supported")
        }
        ParseError::DivisionByZero { .. } => "division by zero".into(),
    };
    LoadError::at(src.loc.line, src.loc.column + e.column().saturating_sub(1), message)
}

fn components(entry: &SynEntry, patch: &CoordinatePatch, expected: usize) -> Result<Vec<ScalarExpr>, LoadError> {
    if entry.values.len() != expected {
        return Err(LoadError::loc(
            entry.loc,
            format!("expected {expected} components, found {}", entry.values.len()),
        ));
    }
    entry
        .values
        .iter()
        .map(|v| parse_expr(&v.text, patch).map_err(|e| expr_error(v, e)))
        .collect()
}

fn frame_index(bundle: &VectorBundle, key: &Src, what: &str) -> Result<usize, LoadError> {
    bundle.frame_index(&key.text).ok_or_else(|| {
        LoadError::loc(
            key.loc,
            format!(
                "`{}` is not in the frame of {what} ({})",
                key.text,
                bundle.frame().join(" ")
            ),
        )
    })
}

impl Model {
    fn base(&self) -> &CoordinatePatch {
        self.patch.as_ref().expect("checked before resolution")
    }

    /// Look up a name that must be of kind `want`.
    fn resolve(&self, name: &Src, want: Kind, context: &str) -> Result<String, LoadError> {
        match self.kinds.get(&name.text) {
            None => Err(LoadError::loc(
                name.loc,
                format!("{context}: `{}` is not declared", name.text),
            )),
            Some(k) if *k != want => Err(LoadError::loc(
                name.loc,
                format!("{context}: `{}` is {k}, expected {want}", name.text),
            )),
            Some(_) => Ok(name.text.clone()),
        }
    }

    fn algebroid(&self, name: &Src, context: &str) -> Result<(String, &LieAlgebroid), LoadError> {
        let n = self.resolve(name, Kind::Algebroid, context)?;
        Ok((n.clone(), &self.algebroids[&n]))
    }

    fn add_algebroid(&mut self, d: &Decl) -> Result<(), LoadError> {
        let patch = match &d.kind {
            DeclKind::Tangent => {
                let t = tangent_algebroid(self.base());
                self.algebroids.insert(d.name.text.clone(), t);
                return Ok(());
            }
            DeclKind::Algebroid { .. } => self.base().clone(),
            _ => return Ok(()),
        };
        let DeclKind::Algebroid {
            frame,
            anchors,
            brackets,
        } = &d.kind
        else {
            unreachable!()
        };
        let (names, floc) = frame
            .as_ref()
            .ok_or_else(|| LoadError::loc(d.loc, format!("algebroid `{}` has no `frame` line", d.name.text)))?;
        let bundle = VectorBundle::new(patch.clone(), names.iter().map(|s| s.text.clone()))
            .map_err(|e| LoadError::loc(*floc, e.to_string()))?;
        let mut alg = LieAlgebroid::abelian(bundle.clone());
        let what = format!("`{}`", d.name.text);
        let mut seen_anchor = vec![false; bundle.rank()];
        for a in anchors {
            let i = frame_index(&bundle, &a.keys[0], &what)?;
            if std::mem::replace(&mut seen_anchor[i], true) {
                return Err(LoadError::loc(
                    a.loc,
                    format!("anchor of `{}` given twice", a.keys[0].text),
                ));
            }
            alg.set_anchor_row(i, components(a, &patch, patch.dimension())?);
        }
        let mut explicit = vec![vec![false; bundle.rank()]; bundle.rank()];
        for b in brackets {
            let i = frame_index(&bundle, &b.keys[0], &what)?;
            let j = frame_index(&bundle, &b.keys[1], &what)?;
            if std::mem::replace(&mut explicit[i][j], true) {
                return Err(LoadError::loc(b.loc, "bracket given twice"));
            }
            let s = Section::new(components(b, &patch, bundle.rank())?);
            if !explicit[j][i] {
                alg.set_structure_function(j, i, -&s);
            }
            alg.set_structure_function(i, j, s);
        }
        self.algebroids.insert(d.name.text.clone(), alg);
        Ok(())
    }

    /// Morphisms, connections and forms.
    fn add_map(&mut self, d: &Decl) -> Result<(), LoadError> {
        let patch = self.base().clone();
        let ctx = format!("`{}`", d.name.text);
        let name = d.name.text.clone();
        match &d.kind {
            DeclKind::Morphism { source, target, body } => {
                let (sn, s) = self.algebroid(source, &ctx)?;
                let (tn, t) = self.algebroid(target, &ctx)?;
                let (sb, tb) = (s.bundle().clone(), t.bundle().clone());
                let map = match body {
                    MorphismBody::Zero => BundleMorphism::zero(sb, tb),
                    MorphismBody::Identity => {
                        if sb != tb {
                            return Err(LoadError::loc(d.loc, "identity needs the same source and target"));
                        }
                        BundleMorphism::identity(sb)
                    }
                    MorphismBody::Anchor => {
                        if *t != tangent_algebroid(&patch) {
                            return Err(LoadError::loc(target.loc, "`anchor` needs a tangent target"));
                        }
                        let cols = (0..s.rank()).map(|a| s.anchor_field(a).as_section()).collect();
                        BundleMorphism::from_columns(sb, tb, cols).expect("rank matches dimension")
                    }
                    MorphismBody::Maps(entries) => {
                        let mut cols = vec![tb.zero(); sb.rank()];
                        let mut seen = vec![false; sb.rank()];
                        for en in entries {
                            let a = frame_index(&sb, &en.keys[0], &format!("`{sn}`"))?;
                            if std::mem::replace(&mut seen[a], true) {
                                return Err(LoadError::loc(en.loc, "image given twice"));
                            }
                            cols[a] = Section::new(components(en, &patch, tb.rank())?);
                        }
                        BundleMorphism::from_columns(sb, tb, cols).expect("shapes match")
                    }
                };
                self.morphisms.insert(
                    name,
                    MorphismDecl {
                        source: sn,
                        target: tn,
                        map,
                    },
                );
            }
            DeclKind::Connection { f, e, gammas } => {
                let (fname, fa) = self.algebroid(f, &ctx)?;
                let (ename, ea) = self.algebroid(e, &ctx)?;
                let (fb, eb) = (fa.bundle().clone(), ea.bundle().clone());
                let mut nabla = FConnection::flat(fa.clone(), eb.clone());
                let mut seen = vec![vec![false; eb.rank()]; fb.rank()];
                for g in gammas {
                    let alpha = frame_index(&fb, &g.keys[0], &format!("`{fname}`"))?;
                    let a = frame_index(&eb, &g.keys[1], &format!("`{ename}`"))?;
                    if std::mem::replace(&mut seen[alpha][a], true) {
                        return Err(LoadError::loc(g.loc, "Christoffel entry given twice"));
                    }
                    nabla.set_christoffel(alpha, a, Section::new(components(g, &patch, eb.rank())?));
                }
                self.connections.insert(
                    name,
                    ConnectionDecl {
                        f: fname,
                        e: ename,
                        nabla,
                    },
                );
            }
            DeclKind::Form2 { f, e, entries } => {
                let (fname, fa) = self.algebroid(f, &ctx)?;
                let (ename, ea) = self.algebroid(e, &ctx)?;
                let (fb, eb) = (fa.bundle().clone(), ea.bundle().clone());
                let mut zeta = ETwoFormOnF::zero(fb.clone(), eb.clone());
                let mut given: BTreeMap<(usize, usize), Section> = BTreeMap::new();
                for en in entries {
                    let alpha = frame_index(&fb, &en.keys[0], &format!("`{fname}`"))?;
                    let beta = frame_index(&fb, &en.keys[1], &format!("`{fname}`"))?;
                    let v = Section::new(components(en, &patch, eb.rank())?);
                    if alpha == beta {
                        if !v.is_zero() {
                            return Err(LoadError::loc(en.loc, "a 2-form vanishes on equal arguments"));
                        }
                        continue;
                    }
                    if given.contains_key(&(alpha, beta)) {
                        return Err(LoadError::loc(en.loc, "form entry given twice"));
                    }
                    if let Some(other) = given.get(&(beta, alpha)) {
                        if *other != -&v {
                            return Err(LoadError::loc(en.loc, "form entries are not antisymmetric"));
                        }
                    }
                    zeta.set(alpha, beta, v.clone());
                    given.insert((alpha, beta), v);
                }
                self.forms2.insert(
                    name,
                    Form2Decl {
                        f: fname,
                        e: ename,
                        zeta,
                    },
                );
            }
            DeclKind::Form1 { f, e, entries } => {
                let (fname, fa) = self.algebroid(f, &ctx)?;
                let (ename, ea) = self.algebroid(e, &ctx)?;
                let (fb, eb) = (fa.bundle().clone(), ea.bundle().clone());
                let mut cols = vec![eb.zero(); fb.rank()];
                let mut seen = vec![false; fb.rank()];
                for en in entries {
                    let alpha = frame_index(&fb, &en.keys[0], &format!("`{fname}`"))?;
                    if std::mem::replace(&mut seen[alpha], true) {
                        return Err(LoadError::loc(en.loc, "form entry given twice"));
                    }
                    cols[alpha] = Section::new(components(en, &patch, eb.rank())?);
                }
                let lambda = BundleMorphism::from_columns(fb, eb, cols).expect("shapes match");
                self.forms1.insert(
                    name,
                    Form1Decl {
                        f: fname,
                        e: ename,
                        lambda,
                    },
                );
            }
            _ => {}
        }
        Ok(())
    }

    fn add_adjustment(&mut self, d: &Decl) -> Result<(), LoadError> {
        let DeclKind::Adjustment { fields } = &d.kind else {
            return Ok(());
        };
        let ctx = format!("adjustment `{}`", d.name.text);
        let get = |key: &str| -> Result<Option<&Src>, LoadError> {
            let mut hits = fields.iter().filter(|(k, _)| k.text == key);
            let first = hits.next().map(|(_, v)| v);
            if let Some((k, _)) = hits.next() {
                return Err(LoadError::loc(k.loc, format!("`{key}` given twice")));
            }
            Ok(first)
        };
        let e_src = get("E")?.ok_or_else(|| LoadError::loc(d.loc, format!("{ctx} needs `E = ...`")))?;
        let f_src = get("F")?.ok_or_else(|| LoadError::loc(d.loc, format!("{ctx} needs `F = ...`")))?;
        let (k_src, c_src, z_src) = (get("K")?, get("connection")?, get("zeta")?);
        for (k, _) in fields {
            if !["E", "F", "K", "connection", "zeta"].contains(&k.text.as_str()) {
                return Err(LoadError::loc(k.loc, format!("unknown adjustment key `{}`", k.text)));
            }
        }
        let (en, e) = self.algebroid(e_src, &ctx)?;
        let (fname, f) = self.algebroid(f_src, &ctx)?;
        let (e, f) = (e.clone(), f.clone());
        let signature = |src: &Src, s: &str, t: &str| -> Result<(), LoadError> {
            if s != en || t != fname {
                return Err(LoadError::loc(
                    src.loc,
                    format!(
                        "{ctx}: `{}` relates `{s}` and `{t}`, expected `{en}` and `{fname}`",
                        src.text
                    ),
                ));
            }
            Ok(())
        };
        let k = match k_src {
            Some(src) => {
                let m = &self.morphisms[&self.resolve(src, Kind::Morphism, &ctx)?];
                signature(src, &m.source, &m.target)?;
                m.map.clone()
            }
            None => BundleMorphism::zero(e.bundle().clone(), f.bundle().clone()),
        };
        let nabla = match c_src {
            Some(src) => {
                let c = &self.connections[&self.resolve(src, Kind::Connection, &ctx)?];
                signature(src, &c.e, &c.f)?;
                c.nabla.clone()
            }
            None => FConnection::flat(f.clone(), e.bundle().clone()),
        };
        let zeta = match z_src {
            Some(src) => {
                let z = &self.forms2[&self.resolve(src, Kind::Form2, &ctx)?];
                signature(src, &z.e, &z.f)?;
                z.zeta.clone()
            }
            None => ETwoFormOnF::zero(f.bundle().clone(), e.bundle().clone()),
        };
        let data = AdjustmentData::new(e, f, k, nabla, zeta).map_err(|err| LoadError::loc(d.loc, err.to_string()))?;
        self.adjustments.insert(d.name.text.clone(), data);
        Ok(())
    }

    fn add_pullback(&mut self, d: &Decl) -> Result<(), LoadError> {
        let DeclKind::Pullback { from, fibre, actions } = &d.kind else {
            return Ok(());
        };
        let ctx = format!("pullback `{}`", d.name.text);
        let from = self.resolve(from, Kind::Adjustment, &ctx)?;
        if fibre.is_empty() {
            return Err(LoadError::loc(d.loc, format!("{ctx} needs a `fibre` line")));
        }
        let phi = Submersion::product(self.base(), fibre.iter().map(|s| s.text.clone()))
            .map_err(|e| LoadError::loc(fibre[0].loc, e.to_string()))?;
        let e = self.adjustments[&from].e_alg();
        let action = if actions.is_empty() {
            None
        } else {
            let mut fields = lifted_action_fields(e, &phi);
            let mut seen = vec![false; e.rank()];
            for en in actions {
                let a = frame_index(e.bundle(), &en.keys[0], &ctx)?;
                if std::mem::replace(&mut seen[a], true) {
                    return Err(LoadError::loc(en.loc, "action given twice"));
                }
                let comps = components(en, phi.total(), phi.total().dimension())?;
                fields[a] = VectorField::new(phi.total(), comps).expect("dimension checked");
            }
            Some(fields)
        };
        self.pullbacks
            .insert(d.name.text.clone(), PullbackDecl { from, phi, action });
        Ok(())
    }

    fn add_extension(&mut self, d: &Decl) -> Result<(), LoadError> {
        let DeclKind::Extension(source) = &d.kind else {
            return Ok(());
        };
        let ctx = format!("extension `{}`", d.name.text);
        let decl = match source {
            ExtensionSource::Named(src) => match self.kinds.get(&src.text) {
                Some(Kind::Adjustment | Kind::Pullback) => ExtensionDecl::From(src.text.clone()),
                _ => {
                    return Err(self
                        .resolve(src, Kind::Adjustment, &ctx)
                        .expect_err("not an adjustment"))
                }
            },
            ExtensionSource::Mackenzie { f, e, nabla, zeta } => {
                let (fname, _) = self.algebroid(f, &ctx)?;
                let (ename, ea) = self.algebroid(e, &ctx)?;
                if !ea.anchor_is_zero() {
                    return Err(LoadError::loc(e.loc, format!("{ctx}: `{ename}` must have zero anchor")));
                }
                let nabla_name = self.resolve(nabla, Kind::Connection, &ctx)?;
                let zeta_name = self.resolve(zeta, Kind::Form2, &ctx)?;
                let c = &self.connections[&nabla_name];
                let z = &self.forms2[&zeta_name];
                if c.f != fname || c.e != ename || z.f != fname || z.e != ename {
                    return Err(LoadError::loc(
                        nabla.loc,
                        format!("{ctx}: connection and form must both relate `{fname}` and `{ename}`"),
                    ));
                }
                ExtensionDecl::Mackenzie {
                    f: fname,
                    e: ename,
                    nabla: nabla_name,
                    zeta: zeta_name,
                }
            }
        };
        self.extensions.insert(d.name.text.clone(), decl);
        Ok(())
    }

    fn task_op(&self, task: &str, op: &Src, args: &[Src]) -> Result<TaskOp, LoadError> {
        let ctx = format!("task `{task}`");
        let arity = |n: usize| -> Result<(), LoadError> {
            if args.len() != n {
                return Err(LoadError::loc(
                    op.loc,
                    format!("{ctx}: `{}` takes {n} argument(s), found {}", op.text, args.len()),
                ));
            }
            Ok(())
        };
        let one = |kind: Kind| -> Result<String, LoadError> {
            arity(1)?;
            self.resolve(&args[0], kind, &ctx)
        };
        let either = |src: &Src| -> Result<String, LoadError> {
            match self.kinds.get(&src.text) {
                Some(Kind::Algebroid | Kind::Extension) => Ok(src.text.clone()),
                _ => self.resolve(src, Kind::Extension, &ctx),
            }
        };
        Ok(match op.text.as_str() {
            "verify_algebroid" => TaskOp::VerifyAlgebroid(one(Kind::Algebroid)?),
            "verify_morphism" => TaskOp::VerifyMorphism(one(Kind::Morphism)?),
            "classify" => TaskOp::Classify(one(Kind::Adjustment)?),
            "check_cartan" => TaskOp::CheckCartan(one(Kind::Adjustment)?),
            "check_covariant" => TaskOp::CheckCovariant(one(Kind::Adjustment)?),
            "check_strict" => TaskOp::CheckStrict(one(Kind::Adjustment)?),
            "strict_bracket" => TaskOp::StrictBracket(one(Kind::Adjustment)?),
            "decomposition" => TaskOp::Decomposition(one(Kind::Adjustment)?),
            "mym" => TaskOp::Mym(one(Kind::Adjustment)?),
            "basic_flatness" => TaskOp::BasicFlatness(one(Kind::Adjustment)?),
            "basic_identities" => TaskOp::BasicIdentities(one(Kind::Adjustment)?),
            "reconstruct" => TaskOp::Reconstruct(one(Kind::Adjustment)?),
            "splitting_change" => {
                arity(3)?;
                let variant = match args[2].text.as_str() {
                    "printed" => SplittingVariant::Printed,
                    "additive" => SplittingVariant::Additive,
                    other => {
                        return Err(LoadError::loc(
                            args[2].loc,
                            format!("{ctx}: variant must be `printed` or `additive`, found `{other}`"),
                        ))
                    }
                };
                TaskOp::SplittingChange {
                    adjustment: self.resolve(&args[0], Kind::Adjustment, &ctx)?,
                    lambda: self.resolve(&args[1], Kind::Form1, &ctx)?,
                    variant,
                }
            }
            "extension" => TaskOp::Extension(one(Kind::Extension)?),
            "compare" => {
                arity(2)?;
                TaskOp::Compare(either(&args[0])?, either(&args[1])?)
            }
            "pullback" => TaskOp::Pullback(one(Kind::Pullback)?),
            "pullback_relations" => TaskOp::PullbackRelations(one(Kind::Pullback)?),
            other => return Err(LoadError::loc(op.loc, format!("{ctx}: unknown operation `{other}`"))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SO3: &str = include_str!("../../fixtures/so3_action.agd");

    fn err_of(src: &str) -> LoadError {
        load_str(src).expect_err("should not load")
    }

    #[test]
    fn empty_file_is_empty_model() {
        let m = load_str("").unwrap();
        assert!(m.tasks.is_empty() && m.patch.is_none());
        let m = load_str("# only a comment\n\n").unwrap();
        assert!(m.tasks.is_empty());
    }

    #[test]
    fn so3_fixture_loads() {
        let m = load_str(SO3).unwrap();
        let d = &m.adjustments["adj"];
        assert_eq!(d, &crate::fixtures::so3_action());
        assert_eq!(m.algebroids["T"], tangent_algebroid(&CoordinatePatch::standard(3)));
        assert!(!m.tasks.is_empty());
    }

    #[test]
    fn undeclared_name_reports_task() {
        let src = format!("{SO3}\ntask t3: strict_bracket zeta2\n");
        let e = err_of(&src);
        let msg = e.to_string();
        assert!(
            msg.contains("task `t3`") && msg.contains("`zeta2` is not declared"),
            "{msg}"
        );
        assert_eq!(e.line(), Some(src.lines().count()));
    }

    #[test]
    fn declaration_order_is_irrelevant() {
        let m = load_str(
            "task t: classify adj\nadjustment adj\n E = E\n F = T\nend\nalgebroid T tangent\npatch x\nalgebroid E\n frame e\nend\n",
        )
        .unwrap();
        assert_eq!(m.tasks[0].op, TaskOp::Classify("adj".into()));
    }

    #[test]
    fn expression_errors_carry_columns() {
        let e = err_of("patch x y\nalgebroid E\n  frame e\n  anchor e: x, sin(y)\nend\n");
        assert_eq!(
            e,
            LoadError::at(
                4,
                16,
                "non-rational function `sin`: only rational expressions are supported"
            )
        );
        let e = err_of("patch x y\nalgebroid E\n  frame e\n  anchor e: x, 2*z\nend\n");
        assert_eq!(e, LoadError::at(4, 18, "unknown identifier `z`"));
    }

    #[test]
    fn shape_errors() {
        let e = err_of("patch x y\nalgebroid E\n  frame e\n  anchor e: x\nend\n");
        assert!(e.to_string().contains("expected 2 components, found 1"), "{e}");
        assert_eq!(e.line(), Some(4));
        let e = err_of("patch x\nalgebroid E\n  frame e\n  bracket e f: 1\nend\n");
        assert!(e.to_string().contains("`f` is not in the frame"), "{e}");
    }

    #[test]
    fn structural_errors() {
        assert!(err_of("algebroid T tangent\n").to_string().contains("no `patch`"));
        assert!(err_of("patch x\npatch y\n").to_string().contains("exactly one patch"));
        assert!(err_of("patch x\nalgebroid T tangent\nalgebroid T tangent\n")
            .to_string()
            .contains("twice"));
        assert!(err_of("patch x\nalgebroid E\n frame e\n")
            .to_string()
            .contains("not closed"));
        assert!(err_of("patch x\nend\n").to_string().contains("without an open block"));
        let e = err_of("patch x\nalgebroid T tangent\nmorphism K: T -> T\n  map d_x: 1\nend\ntask t: classify K\n");
        assert!(
            e.to_string().contains("`K` is a morphism, expected an adjustment"),
            "{e}"
        );
    }

    #[test]
    fn bracket_antisymmetry_is_filled_in() {
        let m = load_str("patch x\nalgebroid E\n frame a b\n bracket a b: x, 1\nend\n").unwrap();
        let e = &m.algebroids["E"];
        assert_eq!(
            e.structure_function(1, 0),
            &Section::new(vec![-ScalarExpr::var(0), ScalarExpr::integer(-1)])
        );
    }

    #[test]
    fn form_entries_must_be_antisymmetric() {
        let base = "patch x y\nalgebroid T tangent\nalgebroid E\n frame e\nend\nform2 z: T -> E\n";
        assert!(load_str(&format!("{base} zeta d_x d_y: 1\n zeta d_y d_x: -1\nend\n")).is_ok());
        let e = err_of(&format!("{base} zeta d_x d_y: 1\n zeta d_y d_x: 1\nend\n"));
        assert!(e.to_string().contains("not antisymmetric"), "{e}");
    }
}
