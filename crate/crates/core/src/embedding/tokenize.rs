use unicode_normalization::char::{decompose_canonical, is_combining_mark};

/// Lowercases `text` and splits it into tokens over the alphabet `[a-z0-9']`.
///
/// Accented Latin letters fold to their base letter and a handful of
/// ligatures expand; any other character is a separator.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        fold_char(c, &mut current, &mut tokens);
    }
    flush(&mut current, &mut tokens);
    tokens
}

fn fold_char(c: char, current: &mut String, tokens: &mut Vec<String>) {
    if c.is_ascii_alphanumeric() || c == '\'' {
        current.push(c.to_ascii_lowercase());
        return;
    }
    if c.is_ascii() {
        flush(current, tokens);
        return;
    }
    match c {
        '\u{2019}' | '\u{2018}' => current.push('\''),
        'ß' => current.push_str("ss"),
        'æ' | 'Æ' => current.push_str("ae"),
        'œ' | 'Œ' => current.push_str("oe"),
        'ø' | 'Ø' => current.push('o'),
        'ł' | 'Ł' => current.push('l'),
        'đ' | 'Đ' => current.push('d'),
        'ð' | 'Ð' => current.push('d'),
        'þ' | 'Þ' => current.push_str("th"),
        'ı' => current.push('i'),
        _ => {
            let mut base = None;
            let mut only_marks = true;
            decompose_canonical(c, |d| {
                if d.is_ascii_alphanumeric() && base.is_none() {
                    base = Some(d.to_ascii_lowercase());
                } else if !is_combining_mark(d) {
                    only_marks = false;
                }
            });
            match base {
                Some(b) if only_marks => current.push(b),
                _ => flush(current, tokens),
            }
        }
    }
}

fn flush(current: &mut String, tokens: &mut Vec<String>) {
    if !current.is_empty() {
        tokens.push(std::mem::take(current));
    }
}
