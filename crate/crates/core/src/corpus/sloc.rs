//! Comment- and literal-aware line counting.

use std::path::Path;

/// Language family, selecting the comment syntax used for SLOC counting and
/// dependency extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LanguageFamily {
    /// `//` and `/* */` comments, `"` strings, `'` character literals.
    CFamily,
    Unknown,
}

const C_FAMILY_EXTENSIONS: &[&str] = &[
    "c", "cc", "cpp", "cxx", "h", "hh", "hpp", "hxx", "java", "cs", "js", "jsx", "ts", "tsx",
    "go", "rs", "kt", "kts", "scala", "swift", "m", "mm", "php", "groovy", "dart",
];

impl LanguageFamily {
    pub fn from_path(path: impl AsRef<Path>) -> Self {
        let ext = path
            .as_ref()
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext {
            Some(e) if C_FAMILY_EXTENSIONS.contains(&e.as_str()) => LanguageFamily::CFamily,
            _ => LanguageFamily::Unknown,
        }
    }
}

/// Removes comments and the contents of string and character literals from
/// C-family source. Newlines are preserved, so line structure is unchanged;
/// a literal collapses to its bare quotes so a line holding only a literal
/// stays non-blank.
pub fn strip_c_family(text: &str) -> String {
    #[derive(PartialEq)]
    enum State {
        Code,
        LineComment,
        BlockComment,
        Str,
    }

    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut state = State::Code;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        match state {
            State::Code => match (c, next) {
                ('/', Some('/')) => {
                    state = State::LineComment;
                    i += 1;
                }
                ('/', Some('*')) => {
                    out.push(' ');
                    state = State::BlockComment;
                    i += 1;
                }
                ('"', _) => {
                    out.push('"');
                    state = State::Str;
                }
                ('\'', _) => match char_literal_len(&chars[i..]) {
                    Some(len) => {
                        out.push_str("''");
                        i += len - 1;
                    }
                    None => out.push('\''),
                },
                _ => out.push(c),
            },
            State::LineComment => {
                if c == '\n' {
                    out.push('\n');
                    state = State::Code;
                }
            }
            State::BlockComment => match (c, next) {
                ('*', Some('/')) => {
                    state = State::Code;
                    i += 1;
                }
                ('\n', _) => out.push('\n'),
                _ => {}
            },
            State::Str => match (c, next) {
                ('\\', Some('\n')) => {
                    out.push('\n');
                    i += 1;
                }
                ('\\', Some(_)) => i += 1,
                ('"', _) => {
                    out.push('"');
                    state = State::Code;
                }
                // unterminated literal ends at the line break
                ('\n', _) => {
                    out.push('\n');
                    state = State::Code;
                }
                _ => {}
            },
        }
        i += 1;
    }
    out
}

/// Length in chars of a character literal starting at `s[0] == '\''`, or
/// `None` when the quote does not open one (e.g. a Rust lifetime).
fn char_literal_len(s: &[char]) -> Option<usize> {
    match s.get(1)? {
        '\\' => {
            // escapes such as '\n', '\'', '\x41', '\u0041'
            let close = s.iter().skip(3).take(8).position(|&c| c == '\'')?;
            Some(close + 4)
        }
        '\n' | '\'' => None,
        _ => (s.get(2) == Some(&'\'')).then_some(3),
    }
}

/// Physical and logical source lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Sloc {
    pub physical: u64,
    pub logical: u64,
}

/// Physical SLOC counts lines that are neither blank nor comment-only.
/// Logical SLOC counts `;` and `}` outside comments and literals for
/// C-family sources and equals the physical count otherwise.
pub fn count_sloc(text: &str, family: LanguageFamily) -> Sloc {
    match family {
        LanguageFamily::Unknown => {
            let physical = text.lines().filter(|l| !l.trim().is_empty()).count() as u64;
            Sloc {
                physical,
                logical: physical,
            }
        }
        LanguageFamily::CFamily => {
            let code = strip_c_family(text);
            let physical = code.lines().filter(|l| !l.trim().is_empty()).count() as u64;
            let logical = code.chars().filter(|&c| c == ';' || c == '}').count() as u64;
            Sloc { physical, logical }
        }
    }
}
