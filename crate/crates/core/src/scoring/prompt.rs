use super::{Result, ScoringError};
use crate::domain::SentimentLabel;

pub const PROMPT_HEADER: &str =
    "Does the following text express positive, neutral, or negative sentiment?";

/// Zero-shot prompt for generative models. The sample is wrapped in curly
/// brackets and the prompt ends with an open bracket for the label.
pub fn build_generative_prompt(text: &str) -> Result<String> {
    if text.is_empty() {
        return Err(ScoringError::EmptyText);
    }
    Ok(format!(
        "{PROMPT_HEADER}\nText: {{{text}}}\nThe sentiment of the text is {{"
    ))
}

/// Reads the label off the first token of a completion, ignoring case and
/// surrounding punctuation.
pub fn parse_generative_label(completion: &str) -> Result<SentimentLabel> {
    let trimmed = completion.trim_matches(|c: char| c.is_whitespace() || c.is_ascii_punctuation());
    let first = trimmed
        .split_whitespace()
        .next()
        .unwrap_or("")
        .trim_matches(|c: char| c.is_ascii_punctuation())
        .to_lowercase();
    first
        .parse::<SentimentLabel>()
        .map_err(|_| ScoringError::Unparseable(completion.to_string()))
}
