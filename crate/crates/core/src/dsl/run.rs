//! Task execution and the flat per-check report.

use std::fmt;
use std::time::Instant;

use serde::Serialize;

use super::{ExtensionDecl, Model, Task, TaskOp};
use crate::adjustment::{
    apply_splitting_change, check_basic_flatness_of_h, check_cartan, check_covariant_adjustment, check_mym,
    check_strict, extract_h, nabla_zeta, reconstruct_adjustment, verify_decomposition, AdjustmentData, AdjustmentError,
    Flag,
};
use crate::algebroid::{verify_algebroid, verify_morphism, FibrewiseBracket, LieAlgebroid};
use crate::connection::verify_basic_identities;
use crate::extension::{build_extension, compare_structure, mackenzie_extension, ExtensionError, ExtensionResult};
use crate::pullback::{pullback_adjustment, verify_pullback_relations, PullbackError, PulledAdjustment};
use crate::report::{Check, CheckBuilder, Report, Status};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryResidual {
    pub at: String,
    pub value: String,
}

/// One check of one task.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub task: String,
    pub check: String,
    pub status: Status,
    pub residuals: Vec<EntryResidual>,
    /// Wall time of the whole task, shared by its entries.
    pub wall_time_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunReport {
    pub entries: Vec<Entry>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn failed(&self) -> bool {
        self.entries.iter().any(|e| e.status == Status::Fail)
    }

    /// 0 when nothing failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut current: Option<&str> = None;
        for e in &self.entries {
            if current != Some(e.task.as_str()) {
                writeln!(f, "task {} ({:.1} ms)", e.task, e.wall_time_ms)?;
                current = Some(&e.task);
            }
            write!(f, "  [{}] {}", e.status, e.check)?;
            if let Some(n) = &e.note {
                write!(f, " ({n})")?;
            }
            writeln!(f)?;
            for r in &e.residuals {
                writeln!(f, "      at {}: {}", r.at, r.value)?;
            }
        }
        let count = |s: Status| self.entries.iter().filter(|e| e.status == s).count();
        write!(
            f,
            "{} checks: {} passed, {} failed, {} skipped",
            self.entries.len(),
            count(Status::Pass),
            count(Status::Fail),
            count(Status::Skipped)
        )
    }
}

/// Run the tasks whose names match `filter` (all when `None`). Tasks run
/// concurrently; entries come back in declaration order.
pub fn run(model: &Model, filter: Option<&str>) -> Result<RunReport, glob::PatternError> {
    let pattern = filter.map(glob::Pattern::new).transpose()?;
    let selected: Vec<&Task> = model
        .tasks
        .iter()
        .filter(|t| pattern.as_ref().is_none_or(|p| p.matches(&t.name)))
        .collect();
    let mut report = RunReport::default();
    if selected.is_empty() {
        report.warnings.push(match filter {
            Some(f) => format!("no task matches `{f}`"),
            None => "the model declares no tasks".into(),
        });
        return Ok(report);
    }
    let results: Vec<(Report, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = selected
            .iter()
            .map(|t| {
                s.spawn(move || {
                    let start = Instant::now();
                    let r = execute(model, &t.op);
                    (r, start.elapsed().as_secs_f64() * 1000.0)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("task panicked")).collect()
    });
    for (task, (r, ms)) in selected.iter().zip(results) {
        for c in r.checks {
            report.entries.push(Entry {
                task: task.name.clone(),
                check: c.name,
                status: c.status,
                residuals: c
                    .residuals
                    .into_iter()
                    .map(|r| EntryResidual {
                        at: r.at,
                        value: r.value,
                    })
                    .collect(),
                wall_time_ms: ms,
                note: c.note,
            });
        }
    }
    Ok(report)
}

fn failure(message: impl fmt::Display) -> Report {
    let mut c = Check::skipped("error", message.to_string());
    c.status = Status::Fail;
    Report::new("error").with(c)
}

/// A failing report carried by an error, or the error message itself.
fn from_adjustment_error(e: AdjustmentError) -> Report {
    match e {
        AdjustmentError::CrossCheck(r) | AdjustmentError::NotLie(r) | AdjustmentError::Hypotheses(r) => r,
        e => failure(e),
    }
}

fn from_extension_error(e: ExtensionError) -> Report {
    match e {
        ExtensionError::CrossCheck(r) | ExtensionError::Conditions(r) => r,
        ExtensionError::Adjustment(e) => from_adjustment_error(e),
        e => failure(e),
    }
}

fn from_pullback_error(e: PullbackError) -> Report {
    match e {
        PullbackError::ActionCompatibility(r) | PullbackError::Downstream(r) => r,
        PullbackError::Adjustment(e) => from_adjustment_error(e),
        e => failure(e),
    }
}

/// Classification up to `stages` steps (1 = Cartan, 2 = covariant,
/// 3 = strict). Steps after a failure are reported as skipped.
fn staged(d: &AdjustmentData, stages: usize) -> Result<(Report, AdjustmentData), AdjustmentError> {
    let steps: [(&str, fn(&AdjustmentData) -> Result<_, AdjustmentError>); 3] = [
        ("cartan", check_cartan),
        ("covariant adjustment", check_covariant_adjustment),
        ("strict", check_strict),
    ];
    let mut report = d.morphism_report().clone();
    let mut data = d.clone();
    for (name, step) in &steps[..stages] {
        if !report.passed() {
            report.push(Check::skipped(*name, "an earlier check failed"));
            continue;
        }
        let c = step(&data)?;
        report.extend(c.report);
        data = c.data;
    }
    Ok((report, data))
}

fn strict_data(d: &AdjustmentData) -> Result<AdjustmentData, Report> {
    let c = d.classify().map_err(from_adjustment_error)?;
    if c.data.is_strict() {
        Ok(c.data)
    } else {
        Err(c.report)
    }
}

fn strict_with_h(d: &AdjustmentData) -> Result<(AdjustmentData, FibrewiseBracket), Report> {
    let d = strict_data(d)?;
    let (h, r) = extract_h(&d).map_err(from_adjustment_error)?;
    if !r.passed() {
        return Err(r);
    }
    Ok((d, h))
}

fn pulled(model: &Model, name: &str) -> Result<(AdjustmentData, PulledAdjustment), Report> {
    let p = &model.pullbacks[name];
    let base = strict_data(&model.adjustments[&p.from])?;
    let pa = pullback_adjustment(&base, &p.phi, p.action.as_deref()).map_err(from_pullback_error)?;
    Ok((base, pa))
}

/// Build a declared extension. On failure the report lists what failed.
pub fn build_named_extension(model: &Model, name: &str) -> Result<ExtensionResult, Report> {
    let decl = model
        .extensions
        .get(name)
        .ok_or_else(|| failure(format!("`{name}` is not a declared extension")))?;
    match decl {
        ExtensionDecl::From(src) => {
            let d = match model.adjustments.get(src) {
                Some(d) => strict_data(d)?,
                None => pulled(model, src)?.1.data,
            };
            build_extension(&d).map_err(from_extension_error)
        }
        ExtensionDecl::Mackenzie { f, e, nabla, zeta } => {
            let h = model.algebroids[e].fibrewise();
            mackenzie_extension(
                &model.algebroids[f],
                &h,
                &model.connections[nabla].nabla,
                &model.forms2[zeta].zeta,
            )
            .map_err(from_extension_error)
        }
    }
}

fn algebroid_or_extension(model: &Model, name: &str) -> Result<LieAlgebroid, Report> {
    match model.algebroids.get(name) {
        Some(a) => Ok(a.clone()),
        None => build_named_extension(model, name).map(|r| r.a),
    }
}

fn execute(model: &Model, op: &TaskOp) -> Report {
    match try_execute(model, op) {
        Ok(r) | Err(r) => r,
    }
}

fn try_execute(model: &Model, op: &TaskOp) -> Result<Report, Report> {
    let adj = |n: &str| &model.adjustments[n];
    Ok(match op {
        TaskOp::VerifyAlgebroid(n) => verify_algebroid(&model.algebroids[n]),
        TaskOp::VerifyMorphism(n) => {
            let m = &model.morphisms[n];
            verify_morphism(&m.map, &model.algebroids[&m.source], &model.algebroids[&m.target]).map_err(failure)?
        }
        TaskOp::Classify(n) | TaskOp::CheckStrict(n) => staged(adj(n), 3).map_err(from_adjustment_error)?.0,
        TaskOp::CheckCartan(n) => staged(adj(n), 1).map_err(from_adjustment_error)?.0,
        TaskOp::CheckCovariant(n) => staged(adj(n), 2).map_err(from_adjustment_error)?.0,
        TaskOp::StrictBracket(n) => {
            let d = strict_data(adj(n))?;
            extract_h(&d).map_err(from_adjustment_error)?.1
        }
        TaskOp::Decomposition(n) => {
            let (d, h) = strict_with_h(adj(n))?;
            verify_decomposition(&d, &h)
        }
        TaskOp::Mym(n) => {
            let (d, h) = strict_with_h(adj(n))?;
            check_mym(&nabla_zeta(&d), &h, d.zeta(), Some(d.k()))
        }
        TaskOp::BasicFlatness(n) => {
            let (d, h) = strict_with_h(adj(n))?;
            check_basic_flatness_of_h(&d, &h).map_err(from_adjustment_error)?
        }
        TaskOp::BasicIdentities(n) => {
            let d = adj(n);
            if d.flags().morphism != Flag::Pass {
                return Err(d.morphism_report().clone());
            }
            verify_basic_identities(&d.basic_pair().map_err(from_adjustment_error)?)
        }
        TaskOp::Reconstruct(n) => {
            let (d, h) = strict_with_h(adj(n))?;
            let c = reconstruct_adjustment(&nabla_zeta(&d), &h, d.zeta(), d.k(), d.e_alg(), d.f_alg())
                .map_err(from_adjustment_error)?;
            let (fb, eb) = (d.f_alg().bundle(), d.e_alg().bundle());
            let mut chk = CheckBuilder::new("connection recovered", eb);
            for alpha in 0..fb.rank() {
                for a in 0..eb.rank() {
                    let r = c.data.nabla().christoffel(alpha, a) - d.nabla().christoffel(alpha, a);
                    chk.record(
                        || format!("({}, {})", fb.frame()[alpha], eb.frame()[a]),
                        r.into_components(),
                    );
                }
            }
            c.report.with(chk.finish())
        }
        TaskOp::SplittingChange {
            adjustment,
            lambda,
            variant,
        } => {
            apply_splitting_change(adj(adjustment), &model.forms1[lambda].lambda, *variant)
                .map_err(from_adjustment_error)?
                .report
        }
        TaskOp::Extension(n) => build_named_extension(model, n)?.report,
        TaskOp::Compare(a, b) => {
            let (a, b) = (algebroid_or_extension(model, a)?, algebroid_or_extension(model, b)?);
            Report::new("compare").with(compare_structure(&a, &b))
        }
        TaskOp::Pullback(n) => pulled(model, n)?.1.report,
        TaskOp::PullbackRelations(n) => {
            let (base, pa) = pulled(model, n)?;
            verify_pullback_relations(&base, &pa)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::super::load_str;
    use super::*;

    const SO3: &str = include_str!("../../fixtures/so3_action.agd");

    #[test]
    fn so3_fixture_passes() {
        let m = load_str(SO3).unwrap();
        let r = run(&m, None).unwrap();
        assert!(!r.failed(), "{r}");
        assert_eq!(r.exit_code(), 0);
        assert!(r.entries.iter().any(|e| e.check == "strict"));
    }

    #[test]
    fn filter_matching_nothing_warns() {
        let m = load_str(SO3).unwrap();
        let r = run(&m, Some("nothing*")).unwrap();
        assert!(r.entries.is_empty());
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.warnings, vec!["no task matches `nothing*`".to_string()]);
    }

    #[test]
    fn filter_selects_by_glob() {
        let m = load_str(SO3).unwrap();
        let r = run(&m, Some("verify_*")).unwrap();
        assert!(r.entries.iter().all(|e| e.task.starts_with("verify_")));
        assert!(!r.entries.is_empty());
    }

    #[test]
    fn failures_become_entries() {
        let src = SO3.replace("bracket e1 e2: 0, 0, 1", "bracket e1 e2: 0, 0, -1");
        let m = load_str(&src).unwrap();
        let r = run(&m, Some("verify_E")).unwrap();
        assert_eq!(r.exit_code(), 1);
        let failing: Vec<_> = r.entries.iter().filter(|e| e.status == Status::Fail).collect();
        assert_eq!(failing.len(), 1);
        assert_eq!(failing[0].check, "anchor compatibility");
        assert_eq!(failing[0].residuals[0].value, "-2*x2*d_x1 + 2*x1*d_x2");
    }
}
