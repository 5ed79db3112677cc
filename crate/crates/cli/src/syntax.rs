//! The line-oriented problem file format.
//!
//! ```text
//! # comment
//! tbox {
//!     Professor EquivalentTo Doctor and employment some Chair
//!     writes some ResearchPaper SubClassOf Researcher
//! }
//! observation: Professor SubClassOf Researcher
//! abducibles: all
//! options {
//!     depth_bound: 40
//!     soft_timeout: 10
//!     hard_timeout: none
//!     modules: false
//!     presaturation: true
//! }
//! ```
//!
//! `some` binds tighter than `and`, so `r some A and B` reads as
//! `(r some A) and B`.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Duration;

use el_abduct_core::preprocess::PreprocessError;
use el_abduct_core::{AbductionProblem, Concept, ConceptInclusion, ConceptName, TBox};

const RESERVED: [&str; 5] = ["and", "some", "Top", "SubClassOf", "EquivalentTo"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {}, column {}: {kind}", pos.line, pos.column)]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Expected {
        expected: &'static str,
        found: String,
    },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("`{0}` given more than once")]
    Duplicate(String),
    #[error("missing `{0}`")]
    Missing(&'static str),
    #[error("`{0}` is not opened by a block")]
    StrayClose(char),
    #[error("`{0}` block is never closed")]
    Unclosed(&'static str),
    #[error("unknown concept name `{0}`")]
    UnknownName(String),
    #[error("invalid value `{value}` for `{key}`")]
    InvalidValue { key: String, value: String },
    #[error("the observation must be a SubClassOf axiom")]
    ObservationEquivalence,
}

impl ErrorKind {
    fn at(self, pos: Pos) -> ParseError {
        ParseError { pos, kind: self }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Punct(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Punct(c) => write!(f, "`{c}`"),
            Tok::End => f.write_str("end of line"),
        }
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.')
}

fn tokenize(line_no: usize, line: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = line.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let pos = Pos {
            line: line_no,
            column: line[..i].chars().count() + 1,
        };
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' | ')' | '{' | '}' | ':' | ',' => {
                chars.next();
                out.push((Tok::Punct(c), pos));
            }
            c if is_name_char(c) => {
                let mut end = line.len();
                while let Some(&(j, d)) = chars.peek() {
                    if !is_name_char(d) {
                        end = j;
                        break;
                    }
                    chars.next();
                }
                out.push((Tok::Ident(line[i..end].to_string()), pos));
            }
            other => return Err(ErrorKind::UnexpectedChar(other).at(pos)),
        }
    }
    let column = line.chars().count() + 1;
    out.push((
        Tok::End,
        Pos {
            line: line_no,
            column,
        },
    ));
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [(Tok, Pos)],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [(Tok, Pos)]) -> Self {
        Self { toks, at: 0 }
    }

    fn peek(&self) -> &'a (Tok, Pos) {
        &self.toks[self.at.min(self.toks.len() - 1)]
    }

    fn bump(&mut self) -> &'a (Tok, Pos) {
        let t = self.peek();
        self.at += 1;
        t
    }

    fn eat_word(&mut self, word: &str) -> bool {
        let hit = matches!(&self.peek().0, Tok::Ident(s) if s == word);
        if hit {
            self.at += 1;
        }
        hit
    }

    fn eat_punct(&mut self, c: char) -> bool {
        let hit = self.peek().0 == Tok::Punct(c);
        if hit {
            self.at += 1;
        }
        hit
    }

    fn fail<T>(&self, expected: &'static str) -> Result<T, ParseError> {
        let (tok, pos) = self.peek();
        Err(ErrorKind::Expected {
            expected,
            found: tok.to_string(),
        }
        .at(*pos))
    }

    fn expect_punct(&mut self, c: char, expected: &'static str) -> Result<(), ParseError> {
        if self.eat_punct(c) {
            Ok(())
        } else {
            self.fail(expected)
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek().0 {
            Tok::End => Ok(()),
            _ => self.fail("end of line"),
        }
    }

    fn name(&mut self) -> Result<(ConceptName, Pos), ParseError> {
        match self.peek() {
            (Tok::Ident(s), pos) if !RESERVED.contains(&s.as_str()) => {
                self.at += 1;
                Ok((ConceptName::new(s), *pos))
            }
            _ => self.fail("a concept name"),
        }
    }

    fn concept(&mut self) -> Result<Concept, ParseError> {
        let mut parts = vec![self.unary()?];
        while self.eat_word("and") {
            parts.push(self.unary()?);
        }
        Ok(match parts.len() {
            1 => parts.pop().expect("one part"),
            _ => Concept::and(parts),
        })
    }

    fn unary(&mut self) -> Result<Concept, ParseError> {
        if self.eat_punct('(') {
            let c = self.concept()?;
            self.expect_punct(')', "`)`")?;
            return Ok(c);
        }
        if self.eat_word("Top") {
            return Ok(Concept::top());
        }
        let (name, _) = self.name().or_else(|_| self.fail("a concept"))?;
        if self.eat_word("some") {
            let filler = self.unary()?;
            Ok(Concept::exists(name.as_str(), filler))
        } else {
            Ok(Concept::atomic(name))
        }
    }

    /// `C SubClassOf D` yields one CI, `C EquivalentTo D` two.
    fn axiom(&mut self) -> Result<(Vec<ConceptInclusion>, bool), ParseError> {
        let lhs = self.concept()?;
        let equivalence = if self.eat_word("SubClassOf") {
            false
        } else if self.eat_word("EquivalentTo") {
            true
        } else {
            return self.fail("`SubClassOf` or `EquivalentTo`");
        };
        let rhs = self.concept()?;
        self.expect_end()?;
        let mut cis = vec![ConceptInclusion::new(lhs.clone(), rhs.clone())];
        if equivalence {
            cis.push(ConceptInclusion::new(rhs, lhs));
        }
        Ok((cis, equivalence))
    }
}

/// Parses a single concept.
pub fn parse_concept(text: &str) -> Result<Concept, ParseError> {
    let toks = tokenize(1, text)?;
    let mut cur = Cursor::new(&toks);
    let c = cur.concept()?;
    cur.expect_end()?;
    Ok(c)
}

/// Parses a single `SubClassOf` axiom.
pub fn parse_axiom(text: &str) -> Result<ConceptInclusion, ParseError> {
    let toks = tokenize(1, text)?;
    let (mut cis, equivalence) = Cursor::new(&toks).axiom()?;
    if equivalence {
        return Err(ErrorKind::Expected {
            expected: "`SubClassOf`",
            found: "`EquivalentTo`".into(),
        }
        .at(toks[0].1));
    }
    Ok(cis.remove(0))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Abducibles {
    All,
    Names(BTreeSet<ConceptName>),
}

/// Settings from the `options` block. A timeout of `Some(None)` disables the
/// limit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileOptions {
    pub depth_bound: Option<usize>,
    pub soft_timeout: Option<Option<Duration>>,
    pub hard_timeout: Option<Option<Duration>>,
    pub modules: Option<bool>,
    pub presaturation: Option<bool>,
}

impl FileOptions {
    fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

/// Seconds as a decimal number, or `none`.
pub fn parse_timeout(text: &str) -> Result<Option<Duration>, String> {
    if text == "none" {
        return Ok(None);
    }
    text.parse::<f64>()
        .ok()
        .and_then(|s| Duration::try_from_secs_f64(s).ok())
        .map(Some)
        .ok_or_else(|| format!("`{text}` is neither a number of seconds nor `none`"))
}

/// A file where every block is optional; `classify` only needs the TBox.
#[derive(Debug, Clone, Default)]
pub struct Document {
    pub tbox: TBox,
    pub observation: Option<ConceptInclusion>,
    pub abducibles: Option<Abducibles>,
    pub options: FileOptions,
    abducible_pos: Vec<(ConceptName, Pos)>,
    end: Option<Pos>,
}

#[derive(Clone, Copy)]
enum Block {
    TBox,
    Options,
}

impl Block {
    fn name(self) -> &'static str {
        match self {
            Block::TBox => "tbox",
            Block::Options => "options",
        }
    }
}

pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let mut doc = Document::default();
    let mut open: Option<(Block, Pos)> = None;
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut line_count = 0;
    for (i, line) in text.lines().enumerate() {
        line_count = i + 1;
        let toks = tokenize(i + 1, line)?;
        if toks[0].0 == Tok::End {
            continue;
        }
        let mut cur = Cursor::new(&toks);
        if let Some((block, _)) = open {
            if cur.eat_punct('}') {
                cur.expect_end()?;
                open = None;
                continue;
            }
            match block {
                Block::TBox => {
                    for ci in cur.axiom()?.0 {
                        doc.tbox.insert(ci);
                    }
                }
                Block::Options => option_line(&mut cur, &mut doc.options, &mut seen)?,
            }
            continue;
        }
        let (tok, pos) = cur.bump();
        let key = match tok {
            Tok::Ident(k) => k.as_str(),
            Tok::Punct('}') => return Err(ErrorKind::StrayClose('}').at(*pos)),
            other => return Err(expected("a block or key", other, *pos)),
        };
        if !matches!(key, "tbox" | "observation" | "abducibles" | "options") {
            return Err(ErrorKind::UnknownKey(key.to_string()).at(*pos));
        }
        if !seen.insert(key.to_string()) {
            return Err(ErrorKind::Duplicate(key.to_string()).at(*pos));
        }
        match key {
            "tbox" | "options" => {
                let block = if key == "tbox" {
                    Block::TBox
                } else {
                    Block::Options
                };
                cur.expect_punct('{', "`{`")?;
                if cur.eat_punct('}') {
                    cur.expect_end()?;
                } else {
                    cur.expect_end()?;
                    open = Some((block, *pos));
                }
            }
            "observation" => {
                cur.expect_punct(':', "`:`")?;
                let (mut cis, equivalence) = cur.axiom()?;
                if equivalence {
                    return Err(ErrorKind::ObservationEquivalence.at(*pos));
                }
                doc.observation = Some(cis.remove(0));
            }
            _ => {
                cur.expect_punct(':', "`:`")?;
                if cur.eat_word("all") {
                    cur.expect_end()?;
                    doc.abducibles = Some(Abducibles::All);
                } else {
                    let mut names = BTreeSet::new();
                    loop {
                        let (name, at) = cur.name()?;
                        names.insert(name.clone());
                        doc.abducible_pos.push((name, at));
                        if !cur.eat_punct(',') {
                            break;
                        }
                    }
                    cur.expect_end()?;
                    doc.abducibles = Some(Abducibles::Names(names));
                }
            }
        }
    }
    if let Some((block, pos)) = open {
        return Err(ErrorKind::Unclosed(block.name()).at(pos));
    }
    doc.end = Some(Pos {
        line: line_count + 1,
        column: 1,
    });
    Ok(doc)
}

fn expected(what: &'static str, tok: &Tok, pos: Pos) -> ParseError {
    ErrorKind::Expected {
        expected: what,
        found: tok.to_string(),
    }
    .at(pos)
}

fn option_line(
    cur: &mut Cursor<'_>,
    opts: &mut FileOptions,
    seen: &mut BTreeSet<String>,
) -> Result<(), ParseError> {
    let (key, pos) = match cur.bump() {
        (Tok::Ident(k), pos) => (k.clone(), *pos),
        (other, pos) => return Err(expected("an option name", other, *pos)),
    };
    cur.expect_punct(':', "`:`")?;
    let (value, vpos) = match cur.bump() {
        (Tok::Ident(v), pos) => (v.clone(), *pos),
        (other, pos) => return Err(expected("a value", other, *pos)),
    };
    cur.expect_end()?;
    let invalid = || {
        ErrorKind::InvalidValue {
            key: key.clone(),
            value: value.clone(),
        }
        .at(vpos)
    };
    let flag = || match value.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(invalid()),
    };
    match key.as_str() {
        "depth_bound" => opts.depth_bound = Some(value.parse().map_err(|_| invalid())?),
        "soft_timeout" => opts.soft_timeout = Some(parse_timeout(&value).map_err(|_| invalid())?),
        "hard_timeout" => opts.hard_timeout = Some(parse_timeout(&value).map_err(|_| invalid())?),
        "modules" => opts.modules = Some(flag()?),
        "presaturation" => opts.presaturation = Some(flag()?),
        _ => return Err(ErrorKind::UnknownKey(key).at(pos)),
    }
    if !seen.insert(format!("options.{key}")) {
        return Err(ErrorKind::Duplicate(key).at(pos));
    }
    Ok(())
}

/// A complete abduction problem as written in a file.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub tbox: TBox,
    pub observation: ConceptInclusion,
    pub abducibles: Abducibles,
    pub options: FileOptions,
}

/// Parses a problem; abducible names must occur in the TBox or the
/// observation, observation names need not occur in the TBox.
pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    let doc = parse_document(text)?;
    let end = doc.end.expect("set by parse_document");
    let observation = doc
        .observation
        .ok_or_else(|| ErrorKind::Missing("observation").at(end))?;
    let abducibles = doc
        .abducibles
        .ok_or_else(|| ErrorKind::Missing("abducibles").at(end))?;
    let mut sig = doc.tbox.signature();
    sig.extend(&observation.signature());
    if let Some((name, pos)) = doc
        .abducible_pos
        .iter()
        .find(|(n, _)| !sig.concepts.contains(n))
    {
        return Err(ErrorKind::UnknownName(name.to_string()).at(*pos));
    }
    Ok(ProblemFile {
        tbox: doc.tbox,
        observation,
        abducibles,
        options: doc.options,
    })
}

impl ProblemFile {
    /// Lists the abducibles as `all` when they cover the input signature.
    pub fn from_problem(problem: &AbductionProblem) -> Self {
        let abducibles = if *problem.abducibles() == problem.input_signature().concepts {
            Abducibles::All
        } else {
            Abducibles::Names(problem.abducibles().clone())
        };
        Self {
            tbox: problem.background().clone(),
            observation: problem.observation().clone(),
            abducibles,
            options: FileOptions::default(),
        }
    }

    pub fn to_problem(&self) -> Result<AbductionProblem, PreprocessError> {
        let (tbox, obs) = (self.tbox.clone(), self.observation.clone());
        match &self.abducibles {
            Abducibles::All => AbductionProblem::with_full_signature(tbox, obs),
            Abducibles::Names(names) => AbductionProblem::new(tbox, names.iter().cloned(), obs),
        }
    }
}

fn write_timeout(f: &mut fmt::Formatter<'_>, key: &str, t: Option<Duration>) -> fmt::Result {
    match t {
        Some(d) => writeln!(f, "    {key}: {}", d.as_secs_f64()),
        None => writeln!(f, "    {key}: none"),
    }
}

impl fmt::Display for ProblemFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tbox {{")?;
        for ci in self.tbox.iter() {
            writeln!(f, "    {ci}")?;
        }
        writeln!(f, "}}")?;
        writeln!(f, "observation: {}", self.observation)?;
        match &self.abducibles {
            Abducibles::All => writeln!(f, "abducibles: all")?,
            Abducibles::Names(names) => {
                let list: Vec<_> = names.iter().map(ConceptName::as_str).collect();
                writeln!(f, "abducibles: {}", list.join(", "))?;
            }
        }
        let o = &self.options;
        if !o.is_empty() {
            writeln!(f, "options {{")?;
            if let Some(n) = o.depth_bound {
                writeln!(f, "    depth_bound: {n}")?;
            }
            if let Some(t) = o.soft_timeout {
                write_timeout(f, "soft_timeout", t)?;
            }
            if let Some(t) = o.hard_timeout {
                write_timeout(f, "hard_timeout", t)?;
            }
            if let Some(b) = o.modules {
                writeln!(f, "    modules: {b}")?;
            }
            if let Some(b) = o.presaturation {
                writeln!(f, "    presaturation: {b}")?;
            }
            writeln!(f, "}}")?;
        }
        Ok(())
    }
}
