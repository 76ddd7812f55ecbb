//! Vocabulary construction and sparse word–context co-occurrence counting.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::{self, TaggedCorpus, Utterance};
use crate::error::{Error, Result};

/// Dense integer id of a vocabulary word.
pub type WordId = u32;

/// Bidirectional word <-> id map with corpus frequencies. Ids are assigned
/// by descending frequency, ties broken lexicographically, so builds are
/// deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    freq: Vec<u64>,
    index: HashMap<String, WordId>,
}

impl Vocabulary {
    fn from_sorted(entries: Vec<(String, u64)>) -> Result<Self> {
        let mut words = Vec::with_capacity(entries.len());
        let mut freq = Vec::with_capacity(entries.len());
        let mut index = HashMap::with_capacity(entries.len());
        for (word, count) in entries {
            if count == 0 {
                return Err(Error::InvalidArgument(format!(
                    "word {word:?} has zero frequency"
                )));
            }
            if index.insert(word.clone(), words.len() as WordId).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate word {word:?}")));
            }
            words.push(word);
            freq.push(count);
        }
        Ok(Vocabulary { words, freq, index })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<WordId> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: WordId) -> Option<&str> {
        self.words.get(id as usize).map(String::as_str)
    }

    pub fn freq(&self, id: WordId) -> Option<u64> {
        self.freq.get(id as usize).copied()
    }

    /// Words in id order.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Serializes as `word<TAB>freq`, one line per word in id order.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for (word, freq) in self.words.iter().zip(&self.freq) {
            out.push_str(word);
            out.push('\t');
            out.push_str(&freq.to_string());
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_file_string()).map_err(|e| Error::io(path, e))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.is_empty() {
                continue;
            }
            let (word, freq) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(i + 1, format!("expected `word<TAB>freq`, got {line:?}")))?;
            let freq: u64 = freq
                .parse()
                .map_err(|_| Error::parse(i + 1, format!("bad frequency {freq:?}")))?;
            entries.push((word.to_string(), freq));
        }
        Vocabulary::from_sorted(entries)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

/// Builds the vocabulary of all tokens occurring at least `min_count`
/// times in the corpus.
pub fn build_vocabulary(corpus: &TaggedCorpus, min_count: u64) -> Result<Vocabulary> {
    if min_count == 0 {
        return Err(Error::InvalidArgument("min_count must be >= 1".into()));
    }
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let freq = corpus::token_frequencies(corpus);
    let mut entries: Vec<(String, u64)> = freq
        .into_iter()
        .filter(|&(_, c)| c >= min_count)
        .map(|(w, c)| (w.to_string(), c))
        .collect();
    entries.sort_by(|(wa, ca), (wb, cb)| cb.cmp(ca).then_with(|| wa.cmp(wb)));
    Vocabulary::from_sorted(entries)
}

/// Sparse |V|x|V| matrix of word–context pair counts `f[i][j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseCooccurrence {
    size: usize,
    window: usize,
    counts: HashMap<(WordId, WordId), u64>,
    total: u64,
}

impl SparseCooccurrence {
    /// Builds a matrix from explicit entries. All counts must be positive
    /// and ids in range; duplicate coordinates are rejected.
    pub fn from_entries(
        size: usize,
        window: usize,
        entries: impl IntoIterator<Item = (WordId, WordId, u64)>,
    ) -> Result<Self> {
        let mut counts = HashMap::new();
        let mut total = 0u64;
        for (i, j, c) in entries {
            if (i as usize) >= size {
                return Err(Error::IdOutOfRange { id: i, size });
            }
            if (j as usize) >= size {
                return Err(Error::IdOutOfRange { id: j, size });
            }
            if c == 0 {
                return Err(Error::InvalidArgument(format!(
                    "zero count stored at ({i}, {j})"
                )));
            }
            if counts.insert((i, j), c).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate entry at ({i}, {j})"
                )));
            }
            total += c;
        }
        Ok(SparseCooccurrence {
            size,
            window,
            counts,
            total,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Sum of all stored counts.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.counts.len()
    }

    /// Count for a pair; absent pairs are 0.
    pub fn count(&self, i: WordId, j: WordId) -> u64 {
        self.counts.get(&(i, j)).copied().unwrap_or(0)
    }

    /// Stored entries in arbitrary order.
    pub fn iter(&self) -> impl Iterator<Item = (WordId, WordId, u64)> + '_ {
        self.counts.iter().map(|(&(i, j), &c)| (i, j, c))
    }

    /// Stored entries sorted by (row, column).
    pub fn sorted_entries(&self) -> Vec<(WordId, WordId, u64)> {
        let mut entries: Vec<_> = self.iter().collect();
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        entries
    }

    /// Per-row sums of counts.
    pub fn row_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.size];
        for (&(i, _), &c) in &self.counts {
            sums[i as usize] += c;
        }
        sums
    }

    /// Per-column sums of counts.
    pub fn col_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.size];
        for (&(_, j), &c) in &self.counts {
            sums[j as usize] += c;
        }
        sums
    }

    /// Serializes as a `|V| window total` header followed by `i j count`
    /// triples in row-major order.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} {} {}\n", self.size, self.window, self.total));
        for (i, j, c) in self.sorted_entries() {
            out.push_str(&format!("{i} {j} {c}\n"));
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_file_string()).map_err(|e| Error::io(path, e))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing header"))?;
        let mut fields = header.split_whitespace();
        let size: usize = parse_field(fields.next(), 1, "size")?;
        let window: usize = parse_field(fields.next(), 1, "window")?;
        let total: u64 = parse_field(fields.next(), 1, "total")?;
        let mut entries = Vec::new();
        for (i, line) in lines {
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let row: WordId = parse_field(fields.next(), i + 1, "row")?;
            let col: WordId = parse_field(fields.next(), i + 1, "column")?;
            let count: u64 = parse_field(fields.next(), i + 1, "count")?;
            entries.push((row, col, count));
        }
        let matrix = Self::from_entries(size, window, entries)?;
        if matrix.total != total {
            return Err(Error::parse(
                1,
                format!("header total {total} != sum of counts {}", matrix.total),
            ));
        }
        Ok(matrix)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, line: usize, name: &str) -> Result<T> {
    field
        .and_then(|f| f.parse().ok())
        .ok_or_else(|| Error::parse(line, format!("missing or invalid {name}")))
}

/// Counts word–context pairs within a symmetric window of `window` tokens
/// on each side of every target position. Windows never cross utterance
/// boundaries. Out-of-vocabulary tokens keep their positions but produce
/// no counts.
pub fn count_cooccurrences(
    corpus: &TaggedCorpus,
    vocab: &Vocabulary,
    window: usize,
) -> Result<SparseCooccurrence> {
    if window == 0 {
        return Err(Error::InvalidArgument("window must be >= 1".into()));
    }
    let counts = corpus
        .utterances()
        .par_iter()
        .fold(HashMap::new, |mut map, utt| {
            count_utterance(utt, vocab, window, &mut map);
            map
        })
        .reduce(HashMap::new, merge_counts);
    let total = counts.values().sum();
    Ok(SparseCooccurrence {
        size: vocab.len(),
        window,
        counts,
        total,
    })
}

fn count_utterance(
    utt: &Utterance,
    vocab: &Vocabulary,
    window: usize,
    counts: &mut HashMap<(WordId, WordId), u64>,
) {
    let ids: Vec<Option<WordId>> = utt.tokens().iter().map(|t| vocab.id(t)).collect();
    let n = ids.len();
    for t in 0..n {
        let Some(i) = ids[t] else { continue };
        for u in (t + 1)..n.min(t + window + 1) {
            let Some(j) = ids[u] else { continue };
            *counts.entry((i, j)).or_insert(0) += 1;
            *counts.entry((j, i)).or_insert(0) += 1;
        }
    }
}

fn merge_counts(
    a: HashMap<(WordId, WordId), u64>,
    b: HashMap<(WordId, WordId), u64>,
) -> HashMap<(WordId, WordId), u64> {
    let (mut dst, src) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    for (k, v) in src {
        *dst.entry(k).or_insert(0) += v;
    }
    dst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Tag, Utterance};

    fn corpus_of(token_lists: &[&[&str]]) -> TaggedCorpus {
        let utts: Vec<Utterance> = token_lists
            .iter()
            .enumerate()
            .map(|(i, toks)| {
                Utterance::new(
                    format!("u{i}"),
                    toks.iter().map(|t| t.to_string()).collect(),
                    vec![Tag::En; toks.len()],
                )
                .unwrap()
            })
            .collect();
        TaggedCorpus::new(utts).unwrap()
    }

    #[test]
    fn vocabulary_ordering_and_min_count() {
        let corpus = corpus_of(&[&["a", "b", "a"]]);
        let vocab = build_vocabulary(&corpus, 1).unwrap();
        assert_eq!(vocab.words(), &["a", "b"]);
        assert_eq!(vocab.freq(0), Some(2));
        assert_eq!(vocab.freq(1), Some(1));
        assert_eq!(vocab.id("a"), Some(0));

        let vocab2 = build_vocabulary(&corpus, 2).unwrap();
        assert_eq!(vocab2.words(), &["a"]);
    }

    #[test]
    fn vocabulary_tie_break_is_lexicographic() {
        let corpus = corpus_of(&[&["zz", "aa", "mm"]]);
        let vocab = build_vocabulary(&corpus, 1).unwrap();
        assert_eq!(vocab.words(), &["aa", "mm", "zz"]);
    }

    #[test]
    fn vocabulary_empty_corpus_errors() {
        let empty = TaggedCorpus::default();
        assert!(matches!(
            build_vocabulary(&empty, 1),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn counts_simple_window() {
        let corpus = corpus_of(&[&["a", "b", "c"]]);
        let vocab = build_vocabulary(&corpus, 1).unwrap();
        let counts = count_cooccurrences(&corpus, &vocab, 1).unwrap();
        let a = vocab.id("a").unwrap();
        let b = vocab.id("b").unwrap();
        let c = vocab.id("c").unwrap();
        assert_eq!(counts.count(a, b), 1);
        assert_eq!(counts.count(b, a), 1);
        assert_eq!(counts.count(b, c), 1);
        assert_eq!(counts.count(c, b), 1);
        assert_eq!(counts.count(a, c), 0);
        assert_eq!(counts.total(), 4);
    }

    #[test]
    fn counts_self_pairs_from_distinct_positions() {
        let corpus = corpus_of(&[&["a", "a"]]);
        let vocab = build_vocabulary(&corpus, 1).unwrap();
        let counts = count_cooccurrences(&corpus, &vocab, 1).unwrap();
        assert_eq!(counts.count(0, 0), 2);
        assert_eq!(counts.total(), 2);
    }

    #[test]
    fn counts_two_utterances_window_two() {
        let corpus = corpus_of(&[&["a", "b"], &["b", "a"]]);
        let vocab = build_vocabulary(&corpus, 1).unwrap();
        let counts = count_cooccurrences(&corpus, &vocab, 2).unwrap();
        let a = vocab.id("a").unwrap();
        let b = vocab.id("b").unwrap();
        assert_eq!(counts.count(a, b), 2);
        assert_eq!(counts.count(b, a), 2);
        assert_eq!(counts.total(), 4);
    }

    #[test]
    fn windows_do_not_cross_utterances() {
        let joined = corpus_of(&[&["a", "b", "c", "d"]]);
        let split = corpus_of(&[&["a", "b"], &["c", "d"]]);
        let vocab = build_vocabulary(&joined, 1).unwrap();
        let c_joined = count_cooccurrences(&joined, &vocab, 3).unwrap();
        let c_split = count_cooccurrences(&split, &vocab, 3).unwrap();
        let b = vocab.id("b").unwrap();
        let c = vocab.id("c").unwrap();
        assert!(c_joined.count(b, c) > 0);
        assert_eq!(c_split.count(b, c), 0);
        assert_eq!(c_split.total(), 4);
    }

    #[test]
    fn oov_tokens_keep_positions() {
        // `x` is filtered by min_count in a larger corpus; build a vocab
        // without it and check the window is positional, not collapsed.
        let corpus = corpus_of(&[&["a", "x", "b"]]);
        let pruned = corpus_of(&[&["a", "b"]]);
        let vocab = build_vocabulary(&pruned, 1).unwrap();
        let counts = count_cooccurrences(&corpus, &vocab, 1).unwrap();
        // a and b are 2 apart, window 1 sees nothing
        assert_eq!(counts.total(), 0);
    }

    #[test]
    fn symmetry_holds() {
        let corpus = corpus_of(&[&["a", "b", "a", "c", "b"], &["c", "c", "a"]]);
        let vocab = build_vocabulary(&corpus, 1).unwrap();
        let counts = count_cooccurrences(&corpus, &vocab, 2).unwrap();
        for (i, j, c) in counts.iter() {
            assert_eq!(counts.count(j, i), c, "asymmetry at ({i}, {j})");
        }
    }

    #[test]
    fn serialization_round_trip() {
        let corpus = corpus_of(&[&["a", "b", "c", "a"]]);
        let vocab = build_vocabulary(&corpus, 1).unwrap();
        let counts = count_cooccurrences(&corpus, &vocab, 2).unwrap();

        let parsed = SparseCooccurrence::parse(&counts.to_file_string()).unwrap();
        assert_eq!(parsed, counts);

        let vocab_parsed = Vocabulary::parse(&vocab.to_file_string()).unwrap();
        assert_eq!(vocab_parsed, vocab);
    }

    #[test]
    fn parse_rejects_bad_totals() {
        let text = "2 1 5\n0 1 1\n1 0 1\n";
        assert!(SparseCooccurrence::parse(text).is_err());
    }
}
