use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] peakon_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "numerical",
            _ => "validation",
        }
    }

    /// Machine-readable description; blow-ups carry the partial trace.
    pub fn record(&self) -> Value {
        let mut record = json!({
            "kind": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        if let CliError::Core(peakon_core::Error::BlowUp { t, partial, .. }) = self {
            record["blow_up_time"] = json!(t);
            record["partial_trace"] = serde_json::to_value(partial).unwrap_or(Value::Null);
        }
        record
    }
}
