//! Analysis reports and their text and JSON renderings.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::analysis::{gcd_condition, join_false_positives};
use crate::cohomology::{all_obstructions, LinearCombination, ObstructionResult, ObstructionSystem, Ring};
use crate::document::Document;
use crate::error::Result;
use crate::extendability::{classify, Classification, Verdict};
use crate::linalg::Certificate;
use crate::model::{format_rational, SupportModel};
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub measurements: Vec<String>,
    pub outcomes: Vec<String>,
    pub contexts: Vec<ContextView>,
    pub warnings: Vec<String>,
    pub validation: Validation,
    /// Absent for documents that give a support directly.
    pub no_signalling: Option<NoSignalling>,
    pub connected: bool,
    pub gcd: GcdView,
    /// Absent when the model failed validation.
    pub classification: Option<ClassificationView>,
    pub obstructions: Vec<RingReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextView {
    pub index: usize,
    pub label: String,
    pub members: Vec<String>,
    /// Support tuples in member order.
    pub support: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validation {
    pub valid: bool,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoSignalling {
    pub holds: bool,
    pub violations: Vec<SignallingView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignallingView {
    pub contexts: (usize, usize),
    pub domain: String,
    pub section: String,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcdView {
    pub degrees: Vec<(String, usize)>,
    pub gcd: usize,
    pub cover_size: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationView {
    pub verdict: Verdict,
    pub global_sections: usize,
    pub non_extendable: Vec<SectionRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionRef {
    pub context: usize,
    pub section: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingReport {
    pub ring: Ring,
    pub total: usize,
    pub non_vanishing: usize,
    pub sections: Vec<SectionVerdict>,
    pub false_positives: Vec<SectionRef>,
    pub strong_false_positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionVerdict {
    pub context: usize,
    pub section: String,
    pub vanishes: bool,
    pub extendable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Vec<TermView>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermView {
    pub section: String,
    pub coefficient: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateView {
    /// Equations summing to `0 = 1` modulo 2.
    Mod2 { rows: Vec<EquationView> },
    /// Rational multipliers turning the system into an integral left side
    /// with a non-integral right side.
    Integer { rows: Vec<EquationView> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationView {
    pub contexts: (usize, usize),
    pub domain: String,
    pub section: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplier: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportOptions {
    pub rings: Vec<Ring>,
    /// Attach witnesses and certificates to every section verdict.
    pub details: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { rings: vec![Ring::Integers, Ring::Mod2], details: false }
    }
}

/// Human-readable verdict.
pub fn verdict_text(v: Verdict) -> &'static str {
    match v {
        Verdict::NonContextualPossibilistic => "non-contextual (possibilistic)",
        Verdict::Contextual => "contextual",
        Verdict::StronglyContextual => "strongly contextual",
    }
}

pub fn nesting_warnings(scenario: &Scenario) -> Vec<String> {
    scenario
        .nested_contexts()
        .into_iter()
        .map(|(i, j)| format!("context {i} is contained in context {j}"))
        .collect()
}

/// Runs every analysis on a loaded document. A signalling distribution or a
/// restriction-inconsistent support yields a report with `validation.valid`
/// false and no verdicts.
pub fn build_report(doc: &Document, options: &ReportOptions) -> Result<Report> {
    let scenario = &doc.scenario;
    let mut errors = Vec::new();

    let no_signalling = doc.empirical().map(|e| {
        let violations: Vec<SignallingView> = e
            .check_no_signalling()
            .into_iter()
            .map(|v| SignallingView {
                contexts: v.contexts,
                domain: scenario.set_label(v.section.domain()),
                section: scenario.section_label(&v.section),
                left: format_rational(&v.left),
                right: format_rational(&v.right),
            })
            .collect();
        NoSignalling { holds: violations.is_empty(), violations }
    });
    if let Some(ns) = &no_signalling {
        for v in &ns.violations {
            errors.push(format!(
                "signalling: contexts {} and {} give {} = {} probabilities {} and {}",
                v.contexts.0, v.contexts.1, v.domain, v.section, v.left, v.right
            ));
        }
    }

    // the support of a signalling table is still shown
    let support = doc.support_model().ok();
    let support_lists: Vec<Vec<String>> = match (&support, doc.empirical()) {
        (Some(s), _) => s.supports().iter().map(|set| set.iter().map(|t| scenario.section_label(t)).collect()).collect(),
        (None, Some(e)) => (0..scenario.contexts().len())
            .map(|c| e.table(c).support().map(|t| scenario.section_label(t)).collect())
            .collect(),
        (None, None) => vec![Vec::new(); scenario.contexts().len()],
    };
    if let Some(s) = &support {
        for v in s.consistency_violations() {
            errors.push(format!(
                "support: section {} over {} appears in context {} but not in the restriction of context {}",
                scenario.section_label(&v.section),
                scenario.set_label(v.section.domain()),
                v.present_in,
                if v.present_in == v.contexts.0 { v.contexts.1 } else { v.contexts.0 }
            ));
        }
    }

    let contexts = scenario
        .contexts()
        .iter()
        .zip(support_lists)
        .map(|(c, support)| ContextView {
            index: c.index,
            label: scenario.set_label(&c.members),
            members: c.members.iter().map(|m| scenario.measurements()[m].clone()).collect(),
            support,
        })
        .collect();

    let g = gcd_condition(scenario);
    let gcd = GcdView {
        degrees: scenario.measurements().iter().cloned().zip(g.degrees).collect(),
        gcd: g.gcd,
        cover_size: g.cover_size,
        holds: g.holds,
    };

    let mut report = Report {
        name: doc.source.name.clone(),
        measurements: scenario.measurements().to_vec(),
        outcomes: scenario.outcomes().to_vec(),
        contexts,
        warnings: nesting_warnings(scenario),
        validation: Validation { valid: errors.is_empty(), errors },
        no_signalling,
        connected: scenario.is_connected(),
        gcd,
        classification: None,
        obstructions: Vec::new(),
    };
    if !report.validation.valid {
        return Ok(report);
    }
    let model = support.expect("valid documents have a support");

    let classification = classify(&model);
    report.classification = Some(ClassificationView {
        verdict: classification.verdict,
        global_sections: classification.global_sections.len(),
        non_extendable: classification
            .non_extendable()
            .map(|(c, k)| SectionRef { context: c, section: scenario.section_label(&model.support(c)[k]) })
            .collect(),
    });
    for &ring in &options.rings {
        report.obstructions.push(ring_report(&model, ring, &classification, options.details)?);
    }
    Ok(report)
}

fn ring_report(model: &SupportModel, ring: Ring, classification: &Classification, details: bool) -> Result<RingReport> {
    let scenario = model.scenario();
    let results = all_obstructions(model, ring)?;
    let fp = join_false_positives(model, ring, &results, classification);
    let mut sections = Vec::with_capacity(results.len());
    for ((c, s), r) in &results {
        let k = model.support(*c).binary_search(s).expect("keyed by support sections");
        sections.push(section_verdict(model, r, classification.extendable[*c][k], details)?);
    }
    Ok(RingReport {
        ring,
        total: results.len(),
        non_vanishing: results.values().filter(|r| !r.vanishes).count(),
        sections,
        false_positives: fp
            .sections
            .iter()
            .map(|(c, s)| SectionRef { context: *c, section: scenario.section_label(s) })
            .collect(),
        strong_false_positive: fp.strong_false_positive,
    })
}

/// Summarises one obstruction result, optionally with its witness or
/// certificate.
pub fn section_verdict(
    model: &SupportModel,
    r: &ObstructionResult,
    extendable: bool,
    details: bool,
) -> Result<SectionVerdict> {
    let scenario = model.scenario();
    let mut v = SectionVerdict {
        context: r.context,
        section: scenario.section_label(&r.section),
        vanishes: r.vanishes,
        extendable,
        witness: None,
        certificate: None,
    };
    if !details {
        return Ok(v);
    }
    if let Some(family) = &r.witness {
        v.witness = Some(family.iter().map(|lc| terms_view(scenario, lc)).collect());
    }
    if let Some(cert) = &r.certificate {
        let sys = ObstructionSystem::build(model, r.context, &r.section)?;
        let eq = |i: usize, multiplier: Option<String>| {
            let label = &sys.equations[i];
            EquationView {
                contexts: label.contexts,
                domain: scenario.set_label(label.section.domain()),
                section: scenario.section_label(&label.section),
                multiplier,
            }
        };
        v.certificate = Some(match cert {
            Certificate::Mod2 { rows } => CertificateView::Mod2 { rows: rows.iter().map(|&i| eq(i, None)).collect() },
            Certificate::Integer { multipliers } => CertificateView::Integer {
                rows: multipliers
                    .iter()
                    .enumerate()
                    .filter(|(_, y)| !y.is_zero())
                    .map(|(i, y)| eq(i, Some(format_rational(y))))
                    .collect(),
            },
        });
    }
    Ok(v)
}

fn terms_view(scenario: &Scenario, lc: &LinearCombination) -> Vec<TermView> {
    lc.terms()
        .map(|(s, c)| TermView { section: scenario.section_label(s), coefficient: c.to_string() })
        .collect()
}

pub fn emit_report(report: &Report, json: bool) -> String {
    if json {
        let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
        s.push('\n');
        s
    } else {
        render_text(report)
    }
}

fn render_text(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}: {} measurements, {} contexts, outcomes {{{}}}",
        r.name,
        r.measurements.len(),
        r.contexts.len(),
        r.outcomes.join(", ")
    );
    for w in &r.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    if let Some(ns) = &r.no_signalling {
        let _ = writeln!(out, "no-signalling: {}", if ns.holds { "holds" } else { "violated" });
    }
    for e in &r.validation.errors {
        let _ = writeln!(out, "  {e}");
    }
    out.push_str("support:\n");
    out.push_str(&support_table(r));
    let _ = writeln!(out, "connected: {}", if r.connected { "yes" } else { "no" });
    let degrees: Vec<String> = r.gcd.degrees.iter().map(|(m, d)| format!("{m}:{d}")).collect();
    let _ = writeln!(
        out,
        "GCD condition: degrees {}; g = {}, |U| = {}: {}",
        degrees.join(" "),
        r.gcd.gcd,
        r.gcd.cover_size,
        if r.gcd.holds { "holds" } else { "fails" }
    );
    let Some(class) = &r.classification else {
        out.push_str("model is invalid; no analysis performed\n");
        return out;
    };
    let _ = writeln!(
        out,
        "classification: {}; {} global sections; {} non-extendable support sections",
        verdict_text(class.verdict),
        class.global_sections,
        class.non_extendable.len()
    );
    for ring in &r.obstructions {
        let _ = writeln!(
            out,
            "obstruction over {}: {}/{} support sections non-vanishing",
            ring.ring, ring.non_vanishing, ring.total
        );
        for v in ring.sections.iter().filter(|v| v.vanishes) {
            let tag = if v.extendable { "extendable" } else { "false positive" };
            let _ = writeln!(out, "  vanishes at {} ({tag})", section_ref(&r.contexts, v.context, &v.section));
        }
        if ring.strong_false_positive {
            out.push_str("  strongly contextual model with a vanishing obstruction\n");
        }
        let _ = writeln!(out, "  false positives: {}", ring.false_positives.len());
        for v in &ring.sections {
            out.push_str(&render_details(&r.contexts, v));
        }
    }
    out
}

/// `[i] AB = 0,1`
pub fn section_ref(contexts: &[ContextView], context: usize, section: &str) -> String {
    format!("[{context}] {} = {section}", contexts[context].label)
}

/// Witness or certificate lines for one verdict, if present.
pub fn render_details(contexts: &[ContextView], v: &SectionVerdict) -> String {
    let mut out = String::new();
    if let Some(family) = &v.witness {
        let _ = writeln!(out, "  witness for {}:", section_ref(contexts, v.context, &v.section));
        for (c, terms) in family.iter().enumerate() {
            let _ = writeln!(out, "    r_{c} [{}] = {}", contexts[c].label, combination_text(terms));
        }
    }
    if let Some(cert) = &v.certificate {
        let (head, rows) = match cert {
            CertificateView::Mod2 { rows } => ("equations summing to 0 = 1 mod 2", rows),
            CertificateView::Integer { rows } => ("multipliers giving an integral left side and fractional right side", rows),
        };
        let _ = writeln!(out, "  certificate for {}: {head}", section_ref(contexts, v.context, &v.section));
        for e in rows {
            let m = e.multiplier.as_deref().map(|m| format!("{m} x ")).unwrap_or_default();
            let _ = writeln!(
                out,
                "    {m}contexts {} and {} at {} = {}",
                e.contexts.0, e.contexts.1, e.domain, e.section
            );
        }
    }
    out
}

fn combination_text(terms: &[TermView]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, t) in terms.iter().enumerate() {
        let c: BigInt = t.coefficient.parse().unwrap_or_default();
        let neg = c.is_negative();
        let mag = c.abs();
        match (i, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        if !mag.is_one() {
            let _ = write!(s, "{mag}");
        }
        let _ = write!(s, "({})", t.section);
    }
    s
}

/// Support rows in a 0/1 grid over every joint outcome of the context, with
/// a fresh header whenever the arity changes.
fn support_table(r: &Report) -> String {
    const MAX_COLUMNS: usize = 32;
    let compact = r.outcomes.iter().all(|o| o.chars().count() == 1);
    let label_width = r.contexts.iter().map(|c| c.label.chars().count()).max().unwrap_or(0) + 2;
    let mut out = String::new();
    let mut arity = None;
    let mut columns: Vec<String> = Vec::new();
    let mut width = 0;
    for ctx in &r.contexts {
        let n = ctx.members.len();
        let count = r.outcomes.len().checked_pow(n as u32).unwrap_or(usize::MAX);
        if count > MAX_COLUMNS {
            let _ = writeln!(out, "  {:<label_width$}{}", ctx.label, ctx.support.join("  "));
            arity = None;
            continue;
        }
        if arity != Some(n) {
            arity = Some(n);
            columns = joint_outcomes(&r.outcomes, n);
            let headers: Vec<String> =
                columns.iter().map(|c| if compact { c.replace(',', "") } else { c.clone() }).collect();
            width = headers.iter().map(|h| h.chars().count()).max().unwrap_or(1) + 2;
            let _ = write!(out, "  {:label_width$}", "");
            for h in &headers {
                let _ = write!(out, "{h:>width$}");
            }
            out.push('\n');
        }
        let _ = write!(out, "  {:<label_width$}", ctx.label);
        for c in &columns {
            let bit = if ctx.support.contains(c) { "1" } else { "0" };
            let _ = write!(out, "{bit:>width$}");
        }
        out.push('\n');
    }
    out
}

/// Comma-joined tuples of length `n`, last position varying fastest.
fn joint_outcomes(outcomes: &[String], n: usize) -> Vec<String> {
    let mut acc = vec![Vec::<&str>::new()];
    for _ in 0..n {
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                outcomes.iter().map(move |o| {
                    let mut p = prefix.clone();
                    p.push(o.as_str());
                    p
                })
            })
            .collect();
    }
    acc.into_iter().map(|t| t.join(",")).collect()
}
