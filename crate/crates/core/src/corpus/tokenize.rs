use std::collections::{BTreeMap, BTreeSet};

/// Version tag of the tokenization rules; part of every recovery's config
/// fingerprint so cached affinities never outlive a tokenizer change.
pub const TOKENIZER_VERSION: &str = "identifier-split/1";

/// Multiset of normalized tokens.
///
/// Every token is lowercase, at least two characters long and contains an
/// alphabetic character.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenBag {
    tokens: BTreeMap<String, u32>,
    total: u64,
}

impl TokenBag {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one occurrence of an already-normalized token.
    pub fn add(&mut self, token: &str) {
        self.add_n(token, 1);
    }

    pub fn add_n(&mut self, token: &str, n: u32) {
        if n == 0 {
            return;
        }
        *self.tokens.entry(token.to_string()).or_insert(0) += n;
        self.total += u64::from(n);
    }

    pub fn count(&self, token: &str) -> u32 {
        self.tokens.get(token).copied().unwrap_or(0)
    }

    /// Sum of all counts.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct tokens.
    pub fn distinct(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Tokens with their counts, in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> + '_ {
        self.tokens.iter().map(|(t, &c)| (t.as_str(), c))
    }
}

impl<'a> FromIterator<&'a str> for TokenBag {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        let mut bag = TokenBag::new();
        for t in iter {
            bag.add(t);
        }
        bag
    }
}

/// A set of tokens to discard while building training documents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopWords(BTreeSet<String>);

impl StopWords {
    pub fn none() -> Self {
        StopWords(BTreeSet::new())
    }

    /// Bundled English function words plus common C-family keywords.
    pub fn bundled() -> Self {
        ENGLISH_STOP_WORDS
            .iter()
            .chain(C_FAMILY_KEYWORDS)
            .map(|w| w.to_string())
            .collect()
    }

    /// Parses a whitespace-separated list; words are lowercased and `#`
    /// starts a comment.
    pub fn parse(text: &str) -> Self {
        text.lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(str::split_whitespace)
            .map(str::to_lowercase)
            .collect()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<String> for StopWords {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        StopWords(iter.into_iter().collect())
    }
}

/// Tokenizes text without stop-word removal.
pub fn tokenize(text: &str) -> TokenBag {
    tokenize_with(text, &StopWords::none())
}

/// Splits on non-alphanumeric characters, then on camelCase and
/// letter/digit boundaries; lowercases and drops short, numeric and stop-word
/// tokens. Only the split parts are kept, never the compound.
pub fn tokenize_with(text: &str, stop_words: &StopWords) -> TokenBag {
    let mut bag = TokenBag::new();
    let mut run: Vec<char> = Vec::with_capacity(32);
    let flush = |run: &mut Vec<char>, bag: &mut TokenBag| {
        split_run(run, |piece| {
            let token = piece.iter().collect::<String>().to_lowercase();
            if token.chars().count() >= 2
                && token.chars().any(char::is_alphabetic)
                && !stop_words.contains(&token)
            {
                bag.add(&token);
            }
        });
        run.clear();
    };
    for c in text.chars() {
        if c.is_alphanumeric() {
            run.push(c);
        } else if !run.is_empty() {
            flush(&mut run, &mut bag);
        }
    }
    if !run.is_empty() {
        flush(&mut run, &mut bag);
    }
    bag
}

fn split_run(run: &[char], mut emit: impl FnMut(&[char])) {
    let mut start = 0;
    for i in 1..run.len() {
        let (prev, cur) = (run[i - 1], run[i]);
        let digit_edge = prev.is_numeric() != cur.is_numeric();
        let camel = prev.is_lowercase() && cur.is_uppercase();
        // "HTTPServer": split before the last capital of an acronym
        let acronym_end = prev.is_uppercase()
            && cur.is_uppercase()
            && run.get(i + 1).is_some_and(|n| n.is_lowercase());
        if digit_edge || camel || acronym_end {
            emit(&run[start..i]);
            start = i;
        }
    }
    emit(&run[start..]);
}

const ENGLISH_STOP_WORDS: &[&str] = &[
    "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are", "as",
    "at", "be", "because", "been", "before", "being", "below", "between", "both", "but", "by",
    "can", "could", "did", "do", "does", "doing", "down", "during", "each", "few", "for", "from",
    "further", "had", "has", "have", "having", "he", "her", "here", "hers", "herself", "him",
    "himself", "his", "how", "if", "in", "into", "is", "it", "its", "itself", "just", "me",
    "more", "most", "my", "myself", "no", "nor", "not", "now", "of", "off", "on", "once", "only",
    "or", "other", "our", "ours", "ourselves", "out", "over", "own", "same", "she", "should",
    "so", "some", "such", "than", "that", "the", "their", "theirs", "them", "themselves", "then",
    "there", "these", "they", "this", "those", "through", "to", "too", "under", "until", "up",
    "very", "was", "we", "were", "what", "when", "where", "which", "while", "who", "whom", "why",
    "will", "with", "would", "you", "your", "yours", "yourself", "yourselves",
];

const C_FAMILY_KEYWORDS: &[&str] = &[
    "abstract", "auto", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "double", "else", "enum", "extends", "extern", "final", "finally",
    "float", "goto", "implements", "import", "include", "instanceof", "int", "interface", "long",
    "native", "new", "null", "package", "private", "protected", "public", "register", "return",
    "short", "signed", "sizeof", "static", "struct", "super", "switch", "synchronized", "throw",
    "throws", "transient", "true", "false", "try", "typedef", "union", "unsigned", "void",
    "volatile", "string",
];
