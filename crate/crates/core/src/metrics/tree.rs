use std::fmt;

use super::MetricError;

/// Ordered labeled tree read from bracketed notation such as
/// `(NP (DT a) (NN cat))`. Bare tokens become leaf nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParseTree {
    pub label: String,
    pub children: Vec<ParseTree>,
}

impl ParseTree {
    pub fn leaf(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            children: Vec::new(),
        }
    }

    pub fn node(label: impl Into<String>, children: Vec<ParseTree>) -> Self {
        Self {
            label: label.into(),
            children,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ParseTree::size).sum::<usize>()
    }

    /// Nodes on the longest root-to-leaf path; a single node has height 1.
    pub fn height(&self) -> usize {
        1 + self.children.iter().map(ParseTree::height).max().unwrap_or(0)
    }

    /// Leaf labels, left to right.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        if self.is_leaf() {
            out.push(&self.label);
        }
        for child in &self.children {
            child.collect_leaves(out);
        }
    }

    /// Rewrites every leaf label in place.
    pub fn map_leaves(&mut self, f: &mut impl FnMut(&str) -> Option<String>) {
        if self.is_leaf() {
            if let Some(replacement) = f(&self.label) {
                self.label = replacement;
            }
        }
        for child in &mut self.children {
            child.map_leaves(f);
        }
    }

    /// Same tree with every child list reversed.
    pub fn mirrored(&self) -> ParseTree {
        ParseTree {
            label: self.label.clone(),
            children: self.children.iter().rev().map(ParseTree::mirrored).collect(),
        }
    }

    fn write_inner(&self, f: &mut fmt::Formatter<'_>, root: bool) -> fmt::Result {
        if self.is_leaf() && !root && !self.label.is_empty() {
            return f.write_str(&self.label);
        }
        write!(f, "({}", self.label)?;
        for child in &self.children {
            f.write_str(" ")?;
            child.write_inner(f, false)?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_inner(f, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Token<'a> {
    Open,
    Close,
    Atom(&'a str),
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&mut self) -> Option<(usize, Token<'a>)> {
        let save = self.pos;
        let next = self.next_token();
        self.pos = save;
        next
    }

    fn next_token(&mut self) -> Option<(usize, Token<'a>)> {
        let rest = &self.text[self.pos..];
        let trimmed = rest.trim_start();
        let start = self.pos + (rest.len() - trimmed.len());
        let first = trimmed.chars().next()?;
        let (token, len) = match first {
            '(' => (Token::Open, 1),
            ')' => (Token::Close, 1),
            _ => {
                let len = trimmed
                    .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
                    .unwrap_or(trimmed.len());
                (Token::Atom(&trimmed[..len]), len)
            }
        };
        self.pos = start + len;
        Some((start, token))
    }
}

fn parse_error(offset: usize, reason: &str) -> MetricError {
    MetricError::TreeParse {
        offset,
        reason: reason.to_string(),
    }
}

/// Parses one bracketed tree. An opening bracket directly followed by another
/// (as in the Penn Treebank wrapper `( (S ...))`) gives an empty root label.
pub fn parse_bracketed(text: &str) -> Result<ParseTree, MetricError> {
    let mut lexer = Lexer { text, pos: 0 };
    let tree = match lexer.next_token() {
        None => return Err(parse_error(0, "empty input")),
        Some((_, Token::Open)) => parse_node(&mut lexer)?,
        Some((offset, _)) => return Err(parse_error(offset, "expected '('")),
    };
    if let Some((offset, _)) = lexer.next_token() {
        return Err(parse_error(offset, "trailing input after the root tree"));
    }
    Ok(tree)
}

// Called just after an opening bracket has been consumed.
fn parse_node(lexer: &mut Lexer<'_>) -> Result<ParseTree, MetricError> {
    let label = match lexer.peek() {
        Some((_, Token::Atom(atom))) => {
            lexer.next_token();
            atom.to_string()
        }
        Some(_) => String::new(),
        None => return Err(parse_error(lexer.pos, "unbalanced brackets")),
    };
    let mut children = Vec::new();
    loop {
        match lexer.next_token() {
            None => return Err(parse_error(lexer.pos, "unbalanced brackets")),
            Some((_, Token::Close)) => return Ok(ParseTree { label, children }),
            Some((_, Token::Open)) => children.push(parse_node(lexer)?),
            Some((_, Token::Atom(atom))) => children.push(ParseTree::leaf(atom)),
        }
    }
}

/// One tree per non-blank line.
pub fn parse_tree_lines(text: &str) -> Result<Vec<ParseTree>, MetricError> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(idx, line)| {
            parse_bracketed(line).map_err(|err| match err {
                MetricError::TreeParse { offset, reason } => MetricError::TreeParse {
                    offset,
                    reason: format!("line {}: {reason}", idx + 1),
                },
                other => other,
            })
        })
        .collect()
}
