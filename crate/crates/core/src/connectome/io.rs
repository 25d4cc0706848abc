use super::{validate, Connectome, ConnectomeError};

/// Parses the strict JSON connectome format and validates the result.
///
/// Neurons may appear in any order in the file; they are sorted by id before
/// the dense-id check. Unknown keys are rejected.
pub fn parse_connectome(text: &str) -> Result<Connectome, ConnectomeError> {
    let mut c: Connectome = serde_json::from_str(text).map_err(|e| ConnectomeError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    c.neurons.sort_by_key(|n| n.id);
    match validate(&c) {
        Ok(()) => Ok(c),
        Err(mut violations) => Err(ConnectomeError::Invalid(violations.swap_remove(0))),
    }
}

pub fn serialize_connectome(c: &Connectome) -> String {
    let mut text = serde_json::to_string_pretty(c).expect("connectome is always representable as JSON");
    text.push('\n');
    text
}
