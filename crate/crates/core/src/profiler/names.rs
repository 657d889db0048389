use crate::error::{Error, Result};

fn soundex_digit(letter: u8) -> u8 {
    match letter {
        b'B' | b'F' | b'P' | b'V' => b'1',
        b'C' | b'G' | b'J' | b'K' | b'Q' | b'S' | b'X' | b'Z' => b'2',
        b'D' | b'T' => b'3',
        b'L' => b'4',
        b'M' | b'N' => b'5',
        b'R' => b'6',
        // vowels and y separate equal codes; h and w are handled by the caller
        _ => b'0',
    }
}

/// American Soundex: first letter followed by three digits.
///
/// Non-ASCII-letter characters are skipped. `h` and `w` do not separate
/// letters with equal codes, vowels do.
pub fn soundex(word: &str) -> Result<String> {
    let mut letters = word
        .bytes()
        .filter(u8::is_ascii_alphabetic)
        .map(|b| b.to_ascii_uppercase());
    let first = letters
        .next()
        .ok_or_else(|| Error::InvalidArgument(format!("soundex: no letters in {word:?}")))?;

    let mut code = Vec::with_capacity(4);
    code.push(first);
    let mut last = soundex_digit(first);
    for letter in letters {
        if code.len() == 4 {
            break;
        }
        if letter == b'H' || letter == b'W' {
            continue;
        }
        let digit = soundex_digit(letter);
        if digit != b'0' && digit != last {
            code.push(digit);
        }
        last = digit;
    }
    code.resize(4, b'0');
    Ok(String::from_utf8(code).expect("ascii"))
}

/// Unit-cost edit distance over characters.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// Case-insensitive edit distance normalized by the longer name.
pub fn levenshtein_name_distance(a: &str, b: &str) -> f64 {
    let a = a.to_lowercase();
    let b = b.to_lowercase();
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 0.0;
    }
    levenshtein(&a, &b) as f64 / longest as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn soundex_reference_codes() {
        for (word, code) in [
            ("robert", "R163"),
            ("rupert", "R163"),
            ("a", "A000"),
            ("Ashcraft", "A261"),
            ("Tymczak", "T522"),
            ("Pfister", "P236"),
            ("Honeyman", "H555"),
            ("united states", "U533"),
        ] {
            assert_eq!(soundex(word).unwrap(), code, "{word}");
        }
        assert!(soundex("2020").is_err());
    }

    #[test]
    fn name_distances() {
        assert_eq!(levenshtein_name_distance("Country", "Country"), 0.0);
        assert!((levenshtein_name_distance("Country", "County") - 1.0 / 7.0).abs() < 1e-15);
        assert_eq!(levenshtein_name_distance("X", "Country"), 1.0);
        assert_eq!(levenshtein_name_distance("NATION", "nation"), 0.0);
    }

    // Full-matrix DP used as an independent check of the two-row version.
    fn reference(a: &str, b: &str) -> usize {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        let mut m = vec![vec![0usize; b.len() + 1]; a.len() + 1];
        for (i, row) in m.iter_mut().enumerate() {
            row[0] = i;
        }
        for j in 0..=b.len() {
            m[0][j] = j;
        }
        for i in 1..=a.len() {
            for j in 1..=b.len() {
                let cost = usize::from(a[i - 1] != b[j - 1]);
                m[i][j] = (m[i - 1][j] + 1).min(m[i][j - 1] + 1).min(m[i - 1][j - 1] + cost);
            }
        }
        m[a.len()][b.len()]
    }

    proptest! {
        #[test]
        fn two_row_matches_full_matrix(a in "[a-d]{0,8}", b in "[a-d]{0,8}") {
            prop_assert_eq!(levenshtein(&a, &b), reference(&a, &b));
            prop_assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
        }

        #[test]
        fn soundex_shape(w in "[a-zA-Z][a-zA-Z ]{0,10}") {
            let code = soundex(&w).unwrap();
            prop_assert_eq!(code.len(), 4);
            prop_assert!(code.as_bytes()[0].is_ascii_uppercase());
            prop_assert!(code.as_bytes()[1..].iter().all(u8::is_ascii_digit));
        }
    }
}
