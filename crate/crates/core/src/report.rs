//! Text and JSON renderings of a pipeline run.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::language::TypeTag;
use crate::normalize::Orientation;
use crate::pipeline::PipelineOutput;
use crate::qfield::{ExtReal, Interval, QNum};
use crate::words::{Alphabet, Verdict};

pub const SCHEMA: &str = "nu-forge.report/1";

fn type_label(alpha: &Alphabet, t: TypeTag) -> String {
    format!("({},{})", alpha.label(t.letter), t.offset)
}

fn piece_name(alpha: &Alphabet, t: TypeTag) -> String {
    format!("f_{}", type_label(alpha, t))
}

fn orientation_name(o: Orientation) -> &'static str {
    match o {
        Orientation::Preserving => "preserving",
        Orientation::Reversing => "reversing",
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Admissible => "admissible",
        Verdict::PeriodicFixedPoint => "periodic fixed point",
        Verdict::NoFixedPoint => "no fixed point",
        Verdict::NotUniformlyRecurrent => "not uniformly recurrent",
        Verdict::UnsupportedShape => "unsupported shape",
    }
}

fn affine(c: &QNum) -> String {
    let s = c.exact();
    if c.is_zero() {
        "x/θ".into()
    } else if let Some(rest) = s.strip_prefix('-') {
        if c.is_rational() {
            format!("x/θ - {rest}")
        } else {
            format!("x/θ + ({s})")
        }
    } else if c.is_rational() {
        format!("x/θ + {s}")
    } else {
        format!("x/θ + ({s})")
    }
}

fn or_none(s: String) -> String {
    if s.is_empty() {
        "(empty)".into()
    } else {
        s
    }
}

pub fn render_text(out: &PipelineOutput) -> String {
    let digits = out.config.digits;
    let binary = out.input.alphabet();
    let fin = out.final_alphabet();
    let mut s = String::new();
    let w = &mut s;

    writeln!(w, "nu-forge report").ok();
    writeln!(w, "morphism: {}", out.input).ok();

    writeln!(w, "\n[1] validity").ok();
    writeln!(w, "verdict: {} ({})", verdict_name(out.validity.verdict), out.validity.detail).ok();
    writeln!(w, "primitive: {}", if out.primitive { "yes" } else { "no" }).ok();
    let fixed: Vec<&str> = out.fixed_letters.iter().map(|&l| binary.label(l)).collect();
    writeln!(w, "fixed points from: {}", fixed.join(", ")).ok();

    let t = &out.trace;
    writeln!(w, "\n[2] normalization").ok();
    writeln!(w, "orientation: {}", orientation_name(t.input_orientation)).ok();
    if t.squared {
        writeln!(w, "squared: yes, working with {} (same fixed points)", t.source).ok();
    } else {
        writeln!(w, "squared: no").ok();
    }
    let transfers: Vec<String> = t.transfers.iter().map(|x| binary.render(x)).collect();
    writeln!(w, "transferred suffixes: {}", or_none(transfers.join(", "))).ok();
    writeln!(w, "pi: {} (shift {})", or_none(binary.render(&t.pi)), t.shift()).ok();
    writeln!(w, "prepared: {}", t.prepared).ok();

    writeln!(w, "\n[3] synchronization and typing").ok();
    writeln!(w, "delay D: {} (every factor of length D has one type and contains both letters)", out.typing.delay).ok();
    writeln!(w, "factors of length D: {}", out.typing.typed.len()).ok();
    writeln!(w, "separable: {}", if out.typing.separable { "yes" } else { "no" }).ok();
    if let Some(order) = &out.typing.type_order {
        let o: Vec<String> = order.iter().map(|&x| type_label(binary, x)).collect();
        writeln!(w, "type order: {}", o.join(" < ")).ok();
    }
    if out.config.verbose {
        for (f, ty) in &out.typing.typed {
            writeln!(w, "  {}\t{}", binary.render(f), type_label(binary, *ty)).ok();
        }
    }

    writeln!(w, "\n[4] extended alphabet").ok();
    match &out.extension {
        None => {
            writeln!(w, "not needed").ok();
        }
        Some(ext) => {
            let ea = ext.coding.alphabet();
            writeln!(w, "letters: {} factors of length {}", ext.coding.size(), ext.coding.delay()).ok();
            for l in ea.letters() {
                writeln!(w, "  {} = {}", ea.label(l), binary.render(ext.coding.factor(l))).ok();
            }
            writeln!(w, "chi:").ok();
            for (l, img) in ext.chi.rules() {
                writeln!(w, "  {l} -> {img}").ok();
            }
            match &ext.typing {
                Some(t) => writeln!(w, "chi delay: {}", t.delay).ok(),
                None => writeln!(w, "chi delay: above {}", out.config.delay_cap).ok(),
            };
            writeln!(w, "chi separable: yes").ok();
            let o: Vec<String> = ext.type_order.iter().map(|&x| type_label(ea, x)).collect();
            writeln!(w, "chi type order: {}", o.join(" < ")).ok();
            let fl: Vec<&str> = ext.diagnostics.fixed_letters.iter().map(|&l| ea.label(l)).collect();
            writeln!(w, "chi fixed points from: {}", fl.join(", ")).ok();
        }
    }

    let im = &out.interval_morphism;
    writeln!(w, "\n[5] interval morphism").ok();
    writeln!(w, "theta: root of {} = 0, θ ≈ {}", out.field.polynomial(), out.field.theta().decimal(20)).ok();
    for l in binary.letters() {
        writeln!(w, "frequency of {}: {}", binary.label(l), out.binary_frequencies[l.index()].exact()).ok();
    }
    for l in fin.letters() {
        writeln!(w, "I_{} = {}", fin.label(l), im.letter_intervals[l.index()].render()).ok();
    }
    let o: Vec<String> = im.type_order.iter().map(|&x| type_label(fin, x)).collect();
    writeln!(w, "type order: {}", o.join(" < ")).ok();
    for p in im.pieces_in_type_order() {
        writeln!(w, "J_{} = {}", type_label(fin, p.tag), p.range.render()).ok();
    }
    for row in &im.pieces {
        for p in row {
            writeln!(w, "{}(x) = {}", piece_name(fin, p.tag), affine(&p.intercept)).ok();
        }
    }

    writeln!(w, "\n[6] sequences").ok();
    for seq in &out.sequences {
        let x = seq.nu.source;
        writeln!(w, "fixed point {}: {}...", binary.label(x), binary.render(&seq.prefix)).ok();
        if let (Some(l), Some(ext)) = (seq.lifted_start, &out.extension) {
            writeln!(w, "lifted start: {}", ext.coding.alphabet().label(l)).ok();
        }
        for a in &seq.nu.anchors {
            let pieces: Vec<String> = a.pieces.iter().map(|&t| piece_name(fin, t)).collect();
            writeln!(w, "anchor: ν[{}] = {} fixed by {}", a.indices[0], a.value.render(), pieces.join(" ∘ ")).ok();
        }
        writeln!(w, "n\texact\ttag\tdecimal").ok();
        for (n, term) in seq.nu.terms.iter().enumerate() {
            writeln!(w, "{}", term_line(n, term, digits)).ok();
            if out.config.verbose && term.shown_tag() == crate::qfield::Tag::Neutral && !term.is_unit_endpoint() {
                writeln!(w, "  (tag unknown: value not decided to be doubled)").ok();
            }
        }
    }

    if let Some(rec) = &out.recurrence {
        writeln!(w, "\n[7] {}-regular recurrence", rec.k).ok();
        writeln!(w, "ν[{k}n+p] = ν[n]/{k} + C_(u[n],p)", k = rec.k).ok();
        for l in fin.letters() {
            for (p, c) in rec.constants[l.index()].iter().enumerate() {
                writeln!(w, "C_({},{}) = {}", fin.label(l), p, c.exact()).ok();
            }
        }
    }

    if let Some(or) = &out.oracle {
        writeln!(w, "\n[8] oracle (prefix {})", or.prefix_len).ok();
        for c in &or.checks {
            writeln!(w, "{}\t{}\t{}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail).ok();
        }
        for (x, d) in &or.discrepancies {
            writeln!(w, "discrepancy[{}] = {}", binary.label(*x), d.decimal(6)).ok();
        }
        let passed = or.checks.iter().filter(|c| c.passed).count();
        writeln!(w, "{passed}/{} checks passed", or.checks.len()).ok();
    }
    s
}

/// `n<TAB>exact<TAB>tag<TAB>decimal`.
pub fn term_line(n: usize, term: &ExtReal, digits: usize) -> String {
    format!("{}\t{}\t{}\t{}", n, term.render(), term.shown_tag().name(), term.value.decimal(digits))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonNumber {
    pub exact: String,
    pub a: String,
    pub b: String,
    pub decimal: String,
}

impl JsonNumber {
    fn new(q: &QNum, digits: usize) -> Self {
        JsonNumber { exact: q.exact(), a: q.a().to_string(), b: q.b().to_string(), decimal: q.decimal(digits) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonPoint {
    pub exact: String,
    pub a: String,
    pub b: String,
    pub tag: String,
    pub decimal: String,
}

impl JsonPoint {
    fn new(x: &ExtReal, digits: usize) -> Self {
        JsonPoint {
            exact: x.render(),
            a: x.value.a().to_string(),
            b: x.value.b().to_string(),
            tag: x.shown_tag().name().into(),
            decimal: x.value.decimal(digits),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonInterval {
    pub lo: JsonPoint,
    pub hi: JsonPoint,
}

impl JsonInterval {
    fn new(i: &Interval, digits: usize) -> Self {
        JsonInterval { lo: JsonPoint::new(&i.lo, digits), hi: JsonPoint::new(&i.hi, digits) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonValidity {
    pub verdict: String,
    pub detail: String,
    pub primitive: bool,
    pub fixed_points: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonNormalization {
    pub orientation: String,
    pub squared: bool,
    pub source: String,
    pub transfers: Vec<String>,
    pub pi: String,
    pub shift: usize,
    pub prepared: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonField {
    pub polynomial: String,
    pub trace: i64,
    pub det: i64,
    pub theta: JsonNumber,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTypedFactor {
    pub factor: String,
    #[serde(rename = "type")]
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTyping {
    pub delay: usize,
    pub separable: bool,
    pub type_order: Option<Vec<String>>,
    pub factors: Vec<JsonTypedFactor>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonLetter {
    pub letter: String,
    pub factor: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonRule {
    pub letter: String,
    pub image: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonExtension {
    pub delay: usize,
    pub alphabet: Vec<JsonLetter>,
    pub chi: Vec<JsonRule>,
    pub chi_delay: Option<usize>,
    pub chi_separable: bool,
    pub fixed_points: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonFrequency {
    pub letter: String,
    pub value: JsonNumber,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonLetterInterval {
    pub letter: String,
    pub interval: JsonInterval,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonPiece {
    #[serde(rename = "type")]
    pub ty: String,
    pub formula: String,
    pub intercept: JsonNumber,
    pub domain: JsonInterval,
    pub range: JsonInterval,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonIntervalMorphism {
    pub letter_intervals: Vec<JsonLetterInterval>,
    pub type_order: Vec<String>,
    pub pieces: Vec<JsonPiece>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonAnchor {
    pub indices: Vec<usize>,
    pub pieces: Vec<String>,
    pub value: JsonPoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTerm {
    pub index: usize,
    pub exact: String,
    pub a: String,
    pub b: String,
    pub tag: String,
    pub decimal: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonSequence {
    pub fixed_point: String,
    pub prefix: String,
    pub lifted_start: Option<String>,
    pub anchors: Vec<JsonAnchor>,
    pub terms: Vec<JsonTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonConstant {
    #[serde(rename = "type")]
    pub ty: String,
    pub value: JsonNumber,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonRecurrence {
    pub k: usize,
    pub constants: Vec<JsonConstant>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonOracle {
    pub prefix_len: usize,
    pub checks: Vec<JsonCheck>,
    pub discrepancies: Vec<JsonFrequency>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonReport {
    pub schema: String,
    pub morphism: String,
    pub validity: JsonValidity,
    pub normalization: JsonNormalization,
    pub field: JsonField,
    pub frequencies: Vec<JsonFrequency>,
    pub typing: JsonTyping,
    pub extension: Option<JsonExtension>,
    pub interval_morphism: JsonIntervalMorphism,
    pub sequences: Vec<JsonSequence>,
    pub recurrence: Option<JsonRecurrence>,
    pub oracle: Option<JsonOracle>,
}

pub fn json_report(out: &PipelineOutput) -> JsonReport {
    let digits = out.config.digits;
    let binary = out.input.alphabet();
    let fin = out.final_alphabet();
    let t = &out.trace;
    let im = &out.interval_morphism;
    JsonReport {
        schema: SCHEMA.into(),
        morphism: out.input.to_string(),
        validity: JsonValidity {
            verdict: verdict_name(out.validity.verdict).into(),
            detail: out.validity.detail.clone(),
            primitive: out.primitive,
            fixed_points: out.fixed_letters.iter().map(|&l| binary.label(l).to_string()).collect(),
        },
        normalization: JsonNormalization {
            orientation: orientation_name(t.input_orientation).into(),
            squared: t.squared,
            source: t.source.to_string(),
            transfers: t.transfers.iter().map(|x| binary.render(x)).collect(),
            pi: binary.render(&t.pi),
            shift: t.shift(),
            prepared: t.prepared.to_string(),
        },
        field: JsonField {
            polynomial: out.field.polynomial(),
            trace: out.field.trace,
            det: out.field.det,
            theta: JsonNumber::new(&out.field.theta(), 20),
        },
        frequencies: binary
            .letters()
            .map(|l| JsonFrequency {
                letter: binary.label(l).into(),
                value: JsonNumber::new(&out.binary_frequencies[l.index()], digits),
            })
            .collect(),
        typing: JsonTyping {
            delay: out.typing.delay,
            separable: out.typing.separable,
            type_order: out.typing.type_order.as_ref().map(|o| o.iter().map(|&x| type_label(binary, x)).collect()),
            factors: out
                .typing
                .typed
                .iter()
                .map(|(f, ty)| JsonTypedFactor { factor: binary.render(f), ty: type_label(binary, *ty) })
                .collect(),
        },
        extension: out.extension.as_ref().map(|ext| {
            let ea = ext.coding.alphabet();
            JsonExtension {
                delay: ext.coding.delay(),
                alphabet: ea
                    .letters()
                    .map(|l| JsonLetter { letter: ea.label(l).into(), factor: binary.render(ext.coding.factor(l)) })
                    .collect(),
                chi: ext.chi.rules().into_iter().map(|(letter, image)| JsonRule { letter, image }).collect(),
                chi_delay: ext.typing.as_ref().map(|t| t.delay),
                chi_separable: true,
                fixed_points: ext.diagnostics.fixed_letters.iter().map(|&l| ea.label(l).to_string()).collect(),
            }
        }),
        interval_morphism: JsonIntervalMorphism {
            letter_intervals: fin
                .letters()
                .map(|l| JsonLetterInterval {
                    letter: fin.label(l).into(),
                    interval: JsonInterval::new(&im.letter_intervals[l.index()], digits),
                })
                .collect(),
            type_order: im.type_order.iter().map(|&x| type_label(fin, x)).collect(),
            pieces: im
                .pieces
                .iter()
                .flatten()
                .map(|p| JsonPiece {
                    ty: type_label(fin, p.tag),
                    formula: affine(&p.intercept),
                    intercept: JsonNumber::new(&p.intercept, digits),
                    domain: JsonInterval::new(&p.domain, digits),
                    range: JsonInterval::new(&p.range, digits),
                })
                .collect(),
        },
        sequences: out
            .sequences
            .iter()
            .map(|seq| JsonSequence {
                fixed_point: binary.label(seq.nu.source).into(),
                prefix: binary.render(&seq.prefix),
                lifted_start: seq.lifted_start.map(|l| fin.label(l).to_string()),
                anchors: seq
                    .nu
                    .anchors
                    .iter()
                    .map(|a| JsonAnchor {
                        indices: a.indices.clone(),
                        pieces: a.pieces.iter().map(|&x| type_label(fin, x)).collect(),
                        value: JsonPoint::new(&a.value, digits),
                    })
                    .collect(),
                terms: seq
                    .nu
                    .terms
                    .iter()
                    .enumerate()
                    .map(|(index, x)| {
                        let p = JsonPoint::new(x, digits);
                        JsonTerm { index, exact: p.exact, a: p.a, b: p.b, tag: p.tag, decimal: p.decimal }
                    })
                    .collect(),
            })
            .collect(),
        recurrence: out.recurrence.as_ref().map(|rec| JsonRecurrence {
            k: rec.k,
            constants: fin
                .letters()
                .flat_map(|l| {
                    rec.constants[l.index()].iter().enumerate().map(move |(p, c)| JsonConstant {
                        ty: type_label(fin, TypeTag::new(l, p)),
                        value: JsonNumber::new(c, digits),
                    })
                })
                .collect(),
        }),
        oracle: out.oracle.as_ref().map(|or| JsonOracle {
            prefix_len: or.prefix_len,
            checks: or
                .checks
                .iter()
                .map(|c| JsonCheck { name: c.name.clone(), passed: c.passed, detail: c.detail.clone() })
                .collect(),
            discrepancies: or
                .discrepancies
                .iter()
                .map(|(x, d)| JsonFrequency { letter: binary.label(*x).into(), value: JsonNumber::new(d, digits) })
                .collect(),
        }),
    }
}

pub fn render_json(out: &PipelineOutput) -> String {
    serde_json::to_string_pretty(&json_report(out)).expect("report serializes")
}
