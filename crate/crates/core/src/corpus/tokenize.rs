//! Word tokenizer shared by index building and scanning.
//!
//! Text is case folded one code point at a time, then split on every maximal
//! run of non-alphanumeric code points. No stemming, no stop words.

/// Split `text` into lowercase word tokens.
pub fn tokenize_text(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            current.push(simple_fold(c));
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Single code point case fold.
///
/// Uses the one-to-one lowercase mapping where it exists and the handful of
/// simple case-folding entries where folding differs from lowercasing.
/// Characters whose lowercase form expands to several code points (such as
/// U+0130) have no simple fold and are kept as they are.
pub fn simple_fold(c: char) -> char {
    if c.is_ascii() {
        return c.to_ascii_lowercase();
    }
    match c {
        'ς' => return 'σ',
        'ϐ' => return 'β',
        'ϑ' => return 'θ',
        'ϕ' => return 'φ',
        'ϖ' => return 'π',
        'ϰ' => return 'κ',
        'ϱ' => return 'ρ',
        'ϵ' => return 'ε',
        'ſ' => return 's',
        'ẛ' => return 'ṡ',
        '\u{0345}' => return 'ι',
        '\u{1FBE}' => return 'ι',
        'ẞ' => return 'ß',
        // Cherokee folds to the uppercase block.
        '\u{13F8}'..='\u{13FD}' => {
            return char::from_u32(c as u32 - 8).unwrap_or(c);
        }
        '\u{AB70}'..='\u{ABBF}' => {
            return char::from_u32(c as u32 - 0xAB70 + 0x13A0).unwrap_or(c);
        }
        '\u{13A0}'..='\u{13F5}' => return c,
        _ => {}
    }
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty() {
        assert!(tokenize_text("").is_empty());
        assert!(tokenize_text("  ,.;  ").is_empty());
    }

    #[test]
    fn case_and_punctuation() {
        assert_eq!(tokenize_text("The cat, the CAT."), ["the", "cat", "the", "cat"]);
    }

    #[test]
    fn digits_split_on_punctuation() {
        assert_eq!(
            tokenize_text("GPT-4o scores 92.0"),
            ["gpt", "4o", "scores", "92", "0"]
        );
    }

    #[test]
    fn unicode_letters_are_word_characters() {
        assert_eq!(tokenize_text("Größe—ÉTÉ naïve"), ["größe", "été", "naïve"]);
        assert_eq!(tokenize_text("ΟΔΟΣ οδος"), ["οδοσ", "οδοσ"]);
        assert_eq!(tokenize_text("数据 集"), ["数据", "集"]);
    }

    #[test]
    fn fold_special_cases() {
        assert_eq!(simple_fold('ẞ'), 'ß');
        assert_eq!(simple_fold('ſ'), 's');
        // No simple fold: kept.
        assert_eq!(simple_fold('\u{0130}'), '\u{0130}');
        assert_eq!(simple_fold('\u{AB70}'), '\u{13A0}');
        assert_eq!(simple_fold('\u{13A0}'), '\u{13A0}');
    }

    proptest! {
        #[test]
        fn idempotent_on_joined_output(s in "\\PC{0,64}") {
            let once = tokenize_text(&s);
            let twice = tokenize_text(&once.join(" "));
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn tokens_nonempty_and_alphanumeric(s in "\\PC{0,64}") {
            for t in tokenize_text(&s) {
                prop_assert!(!t.is_empty());
                prop_assert!(t.chars().all(char::is_alphanumeric));
            }
        }
    }
}
