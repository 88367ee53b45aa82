/// Lowercases `text` and splits it into maximal alphanumeric runs.
///
/// Whitespace and punctuation both act as boundaries, so punctuation-only
/// fragments never survive as tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_and_lowercases() {
        assert_eq!(tokenize("A dog runs."), ["a", "dog", "runs"]);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize(" ... !! ").is_empty());
    }

    #[test]
    fn duplicates_preserved() {
        assert_eq!(
            tokenize("Strawberries, strawberries!"),
            ["strawberries", "strawberries"]
        );
    }

    #[test]
    fn punctuation_inside_words_splits() {
        assert_eq!(tokenize("dog's cup-holder"), ["dog", "s", "cup", "holder"]);
    }
}
