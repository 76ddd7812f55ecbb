//! Token-annotated code-mixed corpora: the tag set, raw-text preprocessing,
//! the corpus file format, splitting, and tag statistics.
//!
//! The on-disk format is one `token<TAB>tag` pair per line, utterances
//! separated by a blank line. A line starting with `#<TAB>` carries the id
//! of the utterance that follows.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// The seven token-level annotation classes.
///
/// The declaration order is the canonical class order everywhere: report
/// rows, classifier score indices, and tie-breaking all use it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    En,
    Hi,
    Univ,
    User,
    Hash,
    U,
    Ne,
}

impl Tag {
    pub const COUNT: usize = 7;

    /// All tags in canonical order.
    pub const ALL: [Tag; Tag::COUNT] = [
        Tag::En,
        Tag::Hi,
        Tag::Univ,
        Tag::User,
        Tag::Hash,
        Tag::U,
        Tag::Ne,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Tag::En => "En",
            Tag::Hi => "Hi",
            Tag::Univ => "Univ",
            Tag::User => "User",
            Tag::Hash => "Hash",
            Tag::U => "U",
            Tag::Ne => "NE",
        }
    }

    /// Position in [`Tag::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Tag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown tag `{s}`")))
    }
}

/// One annotated utterance (a tweet): parallel token and tag sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Utterance {
    id: String,
    tokens: Vec<String>,
    tags: Vec<Tag>,
}

impl Utterance {
    /// Builds an utterance, enforcing that tokens and tags have equal
    /// nonzero length and that tokens are non-empty and whitespace-free.
    pub fn new(id: impl Into<String>, tokens: Vec<String>, tags: Vec<Tag>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::InvalidArgument("utterance has no tokens".into()));
        }
        if tokens.len() != tags.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} tokens vs {} tags",
                tokens.len(),
                tags.len()
            )));
        }
        for tok in &tokens {
            if tok.is_empty() || tok.chars().any(char::is_whitespace) {
                return Err(Error::InvalidArgument(format!(
                    "token {tok:?} is empty or contains whitespace"
                )));
            }
        }
        Ok(Utterance {
            id: id.into(),
            tokens,
            tags,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// An ordered collection of utterances with unique token sequences.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TaggedCorpus {
    utterances: Vec<Utterance>,
}

impl TaggedCorpus {
    /// Builds a corpus, rejecting duplicate token sequences.
    pub fn new(utterances: Vec<Utterance>) -> Result<Self> {
        let mut seen = HashSet::new();
        for utt in &utterances {
            if !seen.insert(utt.tokens.clone()) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate utterance {:?}",
                    utt.tokens.join(" ")
                )));
            }
        }
        Ok(TaggedCorpus { utterances })
    }

    /// Builds a corpus keeping the first occurrence of each token sequence.
    /// Returns the number of dropped duplicates.
    pub fn with_duplicates_removed(utterances: Vec<Utterance>) -> (Self, usize) {
        let mut seen = HashSet::new();
        let mut kept = Vec::with_capacity(utterances.len());
        let mut dropped = 0;
        for utt in utterances {
            if seen.insert(utt.tokens.clone()) {
                kept.push(utt);
            } else {
                dropped += 1;
            }
        }
        (TaggedCorpus { utterances: kept }, dropped)
    }

    pub fn utterances(&self) -> &[Utterance] {
        &self.utterances
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    /// Total number of tokens across all utterances.
    pub fn token_count(&self) -> usize {
        self.utterances.iter().map(Utterance::len).sum()
    }
}

/// Result of loading a corpus file.
#[derive(Debug)]
pub struct CorpusLoad {
    pub corpus: TaggedCorpus,
    pub duplicates_dropped: usize,
}

/// Whitespace-tokenizes a raw utterance and normalizes web noise: URL
/// tokens become the literal `url`, `@user` mentions become `user`.
/// Hashtags keep their surface form and case is left untouched.
///
/// The function is idempotent: re-running it over its own joined output
/// changes nothing.
pub fn preprocess_raw(text: &str) -> Vec<String> {
    text.split_whitespace().map(normalize_token).collect()
}

fn normalize_token(token: &str) -> String {
    if is_url(token) {
        "url".to_string()
    } else if is_mention(token) {
        "user".to_string()
    } else {
        token.to_string()
    }
}

fn is_url(token: &str) -> bool {
    token.starts_with("http://") || token.starts_with("https://") || token.starts_with("www.")
}

fn is_mention(token: &str) -> bool {
    let mut chars = token.chars();
    chars.next() == Some('@') && chars.next().is_some_and(|c| c.is_alphanumeric() || c == '_')
}

/// Parses corpus text in the token-per-line format. Duplicate utterances
/// (identical token sequences) are dropped, first occurrence kept.
pub fn parse_corpus(text: &str) -> Result<CorpusLoad> {
    let mut utterances = Vec::new();
    let mut pending_id: Option<String> = None;
    let mut tokens: Vec<String> = Vec::new();
    let mut tags: Vec<Tag> = Vec::new();

    let mut flush = |pending_id: &mut Option<String>,
                     tokens: &mut Vec<String>,
                     tags: &mut Vec<Tag>,
                     utterances: &mut Vec<Utterance>,
                     line_no: usize|
     -> Result<()> {
        if tokens.is_empty() {
            if pending_id.take().is_some() {
                return Err(Error::parse(line_no, "utterance block has no tokens"));
            }
            return Ok(());
        }
        let id = pending_id
            .take()
            .unwrap_or_else(|| format!("u{}", utterances.len()));
        let utt = Utterance::new(id, std::mem::take(tokens), std::mem::take(tags))?;
        utterances.push(utt);
        Ok(())
    };

    let mut line_no = 0usize;
    for raw_line in text.lines() {
        line_no += 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if line.is_empty() {
            flush(
                &mut pending_id,
                &mut tokens,
                &mut tags,
                &mut utterances,
                line_no,
            )?;
            continue;
        }
        if let Some(rest) = line.strip_prefix("#\t") {
            if tokens.is_empty() && pending_id.is_none() {
                pending_id = Some(rest.to_string());
            }
            // further #-lines inside a block are plain comments
            continue;
        }
        let (token, tag_str) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(line_no, format!("expected `token<TAB>tag`, got {line:?}")))?;
        if token.is_empty() || token.chars().any(char::is_whitespace) {
            return Err(Error::parse(
                line_no,
                format!("token {token:?} is empty or contains whitespace"),
            ));
        }
        let tag = Tag::from_str(tag_str)
            .map_err(|_| Error::parse(line_no, format!("unknown tag `{tag_str}`")))?;
        tokens.push(token.to_string());
        tags.push(tag);
    }
    flush(
        &mut pending_id,
        &mut tokens,
        &mut tags,
        &mut utterances,
        line_no + 1,
    )?;

    let (corpus, duplicates_dropped) = TaggedCorpus::with_duplicates_removed(utterances);
    Ok(CorpusLoad {
        corpus,
        duplicates_dropped,
    })
}

/// Loads a corpus file. See [`parse_corpus`] for format and dedup rules.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<CorpusLoad> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(&text)
}

/// Serializes a corpus in the token-per-line format, including ids, so
/// that saving and re-loading reproduces the corpus exactly.
pub fn corpus_to_string(corpus: &TaggedCorpus) -> String {
    let mut out = String::new();
    for utt in corpus.utterances() {
        out.push_str("#\t");
        out.push_str(utt.id());
        out.push('\n');
        for (tok, tag) in utt.tokens().iter().zip(utt.tags()) {
            out.push_str(tok);
            out.push('\t');
            out.push_str(tag.as_str());
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

pub fn save_corpus(corpus: &TaggedCorpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, corpus_to_string(corpus)).map_err(|e| Error::io(path, e))
}

/// Splits a corpus at utterance granularity into `(train, test)` parts
/// sized by `ratio`, deterministically for a fixed seed. Order within each
/// part follows the original corpus order.
pub fn split_corpus(
    corpus: &TaggedCorpus,
    ratio: (u32, u32),
    seed: u64,
) -> Result<(TaggedCorpus, TaggedCorpus)> {
    let (a, b) = ratio;
    if a == 0 || b == 0 {
        return Err(Error::InvalidArgument(format!(
            "ratio parts must be positive, got {a}:{b}"
        )));
    }
    let n = corpus.len();
    if n < 2 {
        return Err(Error::TooSmallToSplit(n));
    }
    let parts = u64::from(a) + u64::from(b);
    // round(n*a / (a+b)), clamped so both sides stay non-empty
    let n_train = ((n as u64 * u64::from(a) + parts / 2) / parts) as usize;
    let n_train = n_train.clamp(1, n - 1);

    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let train_set: HashSet<usize> = indices[..n_train].iter().copied().collect();

    let mut train = Vec::with_capacity(n_train);
    let mut test = Vec::with_capacity(n - n_train);
    for (i, utt) in corpus.utterances().iter().enumerate() {
        if train_set.contains(&i) {
            train.push(utt.clone());
        } else {
            test.push(utt.clone());
        }
    }
    Ok((
        TaggedCorpus { utterances: train },
        TaggedCorpus { utterances: test },
    ))
}

/// Per-tag token counts over the whole corpus. Every tag is present in the
/// result, zero-count tags included.
pub fn tag_distribution(corpus: &TaggedCorpus) -> BTreeMap<Tag, u64> {
    let mut counts: BTreeMap<Tag, u64> = Tag::ALL.into_iter().map(|t| (t, 0)).collect();
    for utt in corpus.utterances() {
        for tag in utt.tags() {
            *counts.get_mut(tag).expect("all tags present") += 1;
        }
    }
    counts
}

/// Token frequencies, used by the vocabulary builder.
pub(crate) fn token_frequencies(corpus: &TaggedCorpus) -> HashMap<&str, u64> {
    let mut freq: HashMap<&str, u64> = HashMap::new();
    for utt in corpus.utterances() {
        for tok in utt.tokens() {
            *freq.entry(tok.as_str()).or_insert(0) += 1;
        }
    }
    freq
}
