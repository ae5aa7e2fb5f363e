//! JSON payload assembly and serialization with 17-significant-digit
//! floats (round-trip fidelity for doubles; byte-identical reruns).

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use centerpot::field::CertificationRecord;
use centerpot::normal_form::{NormalFormJson, NormalFormResult};
use centerpot::period::{PeriodJson, PeriodSeries};
use centerpot::pipeline::AbelCheck;
use centerpot::potential::{PotentialJson, PotentialResult};
use centerpot::verify::VerificationReport;

#[derive(Serialize)]
pub struct Payload {
    pub timestamp: String,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certification: Option<CertificationRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normal_form: Option<NormalFormJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<PeriodJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abel_checks: Option<Vec<AbelCheck>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

#[derive(Serialize)]
pub struct ErrorInfo {
    pub stage: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

impl Payload {
    pub fn new(command: &'static str) -> Self {
        Self {
            timestamp: chrono::Utc::now().to_rfc3339(),
            command,
            certification: None,
            normal_form: None,
            period: None,
            potential: None,
            abel_checks: None,
            report: None,
            error: None,
        }
    }

    pub fn certification(mut self, record: CertificationRecord) -> Self {
        self.certification = Some(record);
        self
    }

    pub fn normal_form(mut self, nf: &NormalFormResult) -> Self {
        self.normal_form = Some(NormalFormJson::from(nf));
        self
    }

    pub fn period(mut self, period: &PeriodSeries) -> Self {
        self.period = Some(PeriodJson::from(period));
        self
    }

    pub fn potential(mut self, potential: &PotentialResult) -> Self {
        self.potential = Some(PotentialJson::from(potential));
        self
    }

    pub fn abel_checks(mut self, checks: Vec<AbelCheck>) -> Self {
        self.abel_checks = Some(checks);
        self
    }

    pub fn report(mut self, report: &VerificationReport) -> Self {
        self.report = Some(report.clone());
        self
    }

    pub fn error(mut self, stage: &str, message: String) -> Self {
        self.error = Some(ErrorInfo { stage: stage.into(), message, order: None, residual: None });
        self
    }

    pub fn error_static(self, stage: &'static str, message: String) -> Self {
        self.error(stage, message)
    }

    pub fn not_a_center(mut self, order: usize, residual: f64) -> Self {
        self.error = Some(ErrorInfo {
            stage: "normal_form".into(),
            message: format!("not a center to order {order}"),
            order: Some(order),
            residual: Some(residual),
        });
        self
    }
}

/// `serde_json` formatter printing every finite float with 17 significant
/// digits in scientific notation.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        write!(writer, "{value:.7e}")
    }
}

pub fn json_string(payload: &impl Serialize) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    payload.serialize(&mut ser).expect("payload serialization cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Prints the payload to stdout and optionally mirrors it to a file.
pub fn emit(payload: &Payload, out_json: Option<&Path>) {
    let text = json_string(payload);
    println!("{text}");
    if let Some(path) = out_json {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("error: writing {}: {e}", path.display());
        }
    }
}
