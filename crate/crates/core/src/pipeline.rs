//! The end-to-end run: validity, normalization, field and frequencies,
//! synchronization and typing, optional extension, interval morphism and the
//! sequences of the fixed points.

use std::fmt;
use std::sync::Arc;

use num_traits::ToPrimitive;

use crate::error::{Error, ErrorClass, Result};
use crate::extend::{build_chi, chi_frequencies, chi_type_order, lifted_start, verify_chi, ChiDiagnostics, Coding};
use crate::intervals::{build_interval_morphism, IntervalMorphism};
use crate::language::{Language, TypeTag, TypingReport, DEFAULT_DELAY_CAP};
use crate::normalize::{normalize, NormalizationTrace};
use crate::oracle::{discrepancy, empirical_frequency, empirical_nu, maxmin_conflicts, order_mismatches, PrefixUniverse};
use crate::qfield::{dominant_root, solve_frequencies, FieldDesc, QNum};
use crate::sequence::{generate_nu, kregular_recurrence, KRegular, NuSequence};
use crate::words::{admissibility, fixed_point_letters, is_primitive, matrix, parse_morphism, GeneralMorphism, Letter, Validity, Verdict, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointChoice {
    A,
    B,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub morphism: String,
    pub terms: usize,
    pub fixed_point: FixedPointChoice,
    pub digits: usize,
    pub delay_cap: usize,
    pub check: bool,
    pub force_extend: bool,
    pub verbose: bool,
}

impl RunConfig {
    pub fn new(morphism: impl Into<String>) -> Self {
        RunConfig {
            morphism: morphism.into(),
            terms: 16,
            fixed_point: FixedPointChoice::Both,
            digits: 12,
            delay_cap: DEFAULT_DELAY_CAP,
            check: false,
            force_extend: false,
            verbose: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Parse,
    Validity,
    Normalize,
    Field,
    Language,
    Extend,
    Intervals,
    Sequence,
    Oracle,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Parse => "parse",
            Stage::Validity => "validity",
            Stage::Normalize => "normalize",
            Stage::Field => "field",
            Stage::Language => "language",
            Stage::Extend => "extend",
            Stage::Intervals => "intervals",
            Stage::Sequence => "sequence",
            Stage::Oracle => "oracle",
        }
    }
}

/// An error tagged with the stage that raised it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageError {
    pub stage: Stage,
    pub error: Error,
}

impl StageError {
    pub fn exit_code(&self) -> i32 {
        self.error.class().exit_code()
    }

    pub fn class(&self) -> ErrorClass {
        self.error.class()
    }
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage.name(), self.error)
    }
}

impl std::error::Error for StageError {}

trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError> {
        self.map_err(|error| StageError { stage, error })
    }
}

#[derive(Debug, Clone)]
pub struct Extension {
    pub coding: Coding,
    pub chi: GeneralMorphism,
    pub diagnostics: ChiDiagnostics,
    /// Typing of χ at its own delay, when that delay is within the cap.
    pub typing: Option<TypingReport>,
    pub type_order: Vec<TypeTag>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub prefix_len: usize,
    pub checks: Vec<OracleCheck>,
    /// Star discrepancy of the emitted terms, per fixed point.
    pub discrepancies: Vec<(Letter, QNum)>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone)]
pub struct SequenceOutput {
    pub nu: NuSequence,
    /// Prefix of the binary fixed point.
    pub prefix: Word,
    /// Extended letter starting the lifted fixed point.
    pub lifted_start: Option<Letter>,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub config: RunConfig,
    pub input: GeneralMorphism,
    pub validity: Validity,
    pub primitive: bool,
    pub fixed_letters: Vec<Letter>,
    pub trace: NormalizationTrace,
    pub field: Arc<FieldDesc>,
    /// Letter frequencies of the prepared binary morphism.
    pub binary_frequencies: Vec<QNum>,
    pub typing: TypingReport,
    pub extension: Option<Extension>,
    pub final_morphism: GeneralMorphism,
    pub interval_morphism: IntervalMorphism,
    pub sequences: Vec<SequenceOutput>,
    pub recurrence: Option<KRegular>,
    pub oracle: Option<OracleReport>,
}

impl PipelineOutput {
    /// Display labels of the alphabet the interval morphism is built on.
    pub fn final_alphabet(&self) -> &crate::words::Alphabet {
        self.final_morphism.alphabet()
    }
}

const ORACLE_PREFIX: usize = 100_000;
const ORACLE_SAMPLES: usize = 4096;

pub fn run(config: &RunConfig) -> std::result::Result<PipelineOutput, StageError> {
    let input = parse_morphism(&config.morphism).at(Stage::Parse)?;
    let validity = admissibility(&input);
    if validity.verdict != Verdict::Admissible {
        return Err(Error::Inadmissible(validity.detail.clone())).at(Stage::Validity);
    }
    let primitive = is_primitive(&input);
    let available = fixed_point_letters(&input);
    let fixed_letters: Vec<Letter> = match config.fixed_point {
        FixedPointChoice::Both => available.iter().copied().collect(),
        FixedPointChoice::A | FixedPointChoice::B => {
            let x = if config.fixed_point == FixedPointChoice::A { Letter::A } else { Letter::B };
            if !available.contains(&x) {
                return Err(Error::NotFixedPointLetter(input.alphabet().label(x).into())).at(Stage::Validity);
            }
            vec![x]
        }
    };

    let trace = normalize(&input).at(Stage::Normalize)?;
    let prepared = trace.prepared.clone();

    let field = dominant_root(&matrix(&prepared)).at(Stage::Field)?;
    let binary_frequencies = solve_frequencies(&matrix(&prepared), &field).at(Stage::Field)?;

    let mut language = Language::new(&prepared).at(Stage::Language)?;
    let delay = language.synchronization_delay(config.delay_cap).at(Stage::Language)?;
    let typing = language.typing_and_separability(delay).at(Stage::Language)?;

    let (extension, final_morphism, type_order) = if typing.separable && !config.force_extend {
        let order = typing.type_order.clone().expect("separable report carries an order");
        (None, prepared.clone(), order)
    } else {
        let facts = language.factors(delay).at(Stage::Extend)?;
        let coding = Coding::new(prepared.alphabet(), &facts).at(Stage::Extend)?;
        let chi = build_chi(&prepared, &coding).at(Stage::Extend)?;
        let diagnostics = verify_chi(&prepared, &chi, &coding).at(Stage::Extend)?;
        let order = chi_type_order(&chi).at(Stage::Extend)?;
        // The delay of χ can exceed the cap; when it is found, its typing must
        // agree with the order read off the images.
        let mut chi_language = Language::for_recoding(&chi, &language, delay, coding.index_map().clone());
        let typing = match chi_language.synchronization_delay(config.delay_cap) {
            Ok(d) => {
                let t = chi_language.typing_and_separability(d).at(Stage::Extend)?;
                if t.type_order.as_ref() != Some(&order) {
                    return Err(Error::Consistency("typing of χ disagrees with its image order".into()))
                        .at(Stage::Extend);
                }
                Some(t)
            }
            Err(Error::SynchronizationDelayNotFound { .. }) => None,
            Err(e) => return Err(e).at(Stage::Extend),
        };
        let ext = Extension { coding, chi: chi.clone(), diagnostics, typing, type_order: order.clone() };
        (Some(ext), chi, order)
    };

    let freqs = if extension.is_some() {
        chi_frequencies(&final_morphism, &field).at(Stage::Intervals)?
    } else {
        binary_frequencies.clone()
    };
    let interval_morphism =
        build_interval_morphism(&final_morphism, &freqs, &type_order, &field).at(Stage::Intervals)?;

    let coding = extension.as_ref().map(|e| &e.coding);
    let mut sequences = Vec::new();
    for &x in &fixed_letters {
        let nu = generate_nu(&input, &trace, coding, &interval_morphism, x, config.terms, None).at(Stage::Sequence)?;
        let prefix = crate::words::fixed_point_prefix(&input, x, 32).at(Stage::Sequence)?;
        let lifted = match coding {
            Some(c) => Some(lifted_start(&input, c, x).at(Stage::Sequence)?),
            None => None,
        };
        sequences.push(SequenceOutput { nu, prefix, lifted_start: lifted });
    }

    let recurrence = if trace.shift() == 0 {
        kregular_recurrence(&interval_morphism, &final_morphism).ok()
    } else {
        None
    };

    let mut out = PipelineOutput {
        config: config.clone(),
        input,
        validity,
        primitive,
        fixed_letters,
        trace,
        field,
        binary_frequencies,
        typing,
        extension,
        final_morphism,
        interval_morphism,
        sequences,
        recurrence,
        oracle: None,
    };
    if config.check {
        let report = run_oracle(&out).at(Stage::Oracle)?;
        let passed = report.passed();
        out.oracle = Some(report);
        if !passed {
            let failed: Vec<String> =
                out.oracle.as_ref().expect("set").checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
            return Err(Error::Consistency(format!("oracle checks failed: {}", failed.join(", ")))).at(Stage::Oracle);
        }
    }
    Ok(out)
}

/// Brute-force checks of the emitted sequences against a long prefix.
pub fn run_oracle(out: &PipelineOutput) -> Result<OracleReport> {
    let mut checks = Vec::new();
    let mut discrepancies = Vec::new();
    let prefix_len = ORACLE_PREFIX.max(8 * out.config.terms);
    for seq in &out.sequences {
        let x = seq.nu.source;
        let label = out.input.alphabet().label(x).to_string();
        let mut pu = PrefixUniverse::from_fixed_point(&out.input, x, prefix_len)?;
        let terms = &seq.nu.terms;

        let bad = order_mismatches(&mut pu, terms)?;
        checks.push(OracleCheck {
            name: format!("order[{label}]"),
            passed: bad.is_empty(),
            detail: format!("{} mismatches over {} pairs", bad.len(), terms.len() * terms.len().saturating_sub(1) / 2),
        });

        let conflicts = maxmin_conflicts(terms);
        checks.push(OracleCheck {
            name: format!("distinct[{label}]"),
            passed: conflicts == 0,
            detail: format!("{conflicts} repeated values"),
        });

        if let Some(first) = terms.first() {
            let samples = ORACLE_SAMPLES.min(pu.len() / 2);
            let emp = empirical_nu(&mut pu, 0, samples)?;
            let gap = (emp.to_f64().unwrap_or(f64::NAN) - first.value.to_f64()).abs();
            checks.push(OracleCheck {
                name: format!("empirical-nu[{label}]"),
                passed: gap <= 0.02,
                detail: format!("|{emp} - ν[0]| = {gap:.5} over {samples} shifts"),
            });
            discrepancies.push((x, discrepancy(terms)?));
        }

        let band = 5.0 / (pu.len() as f64).sqrt();
        for l in out.input.alphabet().letters() {
            let emp = empirical_frequency(&pu, &Word(vec![l]));
            let exact = out.binary_frequencies[l.index()].to_f64();
            let gap = (emp.to_f64().unwrap_or(f64::NAN) - exact).abs();
            checks.push(OracleCheck {
                name: format!("frequency[{label}:{}]", out.input.alphabet().label(l)),
                passed: gap <= band,
                detail: format!("gap {gap:.6}, band {band:.6}"),
            });
        }
    }
    Ok(OracleReport { prefix_len, checks, discrepancies })
}
