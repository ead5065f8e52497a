//! Partition trees describing how a correlation matrix is assembled, and
//! their compact string grammar.
//!
//! ```text
//! tree  := chain ('|' tree)?        right-associative
//! chain := atom+                    "XYZ" means X|(Y|Z)
//! atom  := label | '(' tree ')'
//! label := letter A..Z | decimal index
//! ```
//!
//! Juxtaposition binds tighter than `|`, so `AB|CD` is `(A|B)|(C|D)`.
//! Whitespace is ignored except as a separator between numeric labels.

use std::fmt;

use crate::error::{Error, Result};
use crate::states::subsystem_letter;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartitionTree {
    Leaf(usize),
    Split(Box<PartitionTree>, Box<PartitionTree>),
}

impl PartitionTree {
    pub fn split(left: PartitionTree, right: PartitionTree) -> Self {
        PartitionTree::Split(Box::new(left), Box::new(right))
    }

    /// Right-nested chain `l0|(l1|(…))`. Panics on an empty slice.
    pub fn chain(leaves: &[usize]) -> Self {
        match leaves {
            [] => panic!("chain of zero leaves"),
            [x] => PartitionTree::Leaf(*x),
            [x, rest @ ..] => Self::split(PartitionTree::Leaf(*x), Self::chain(rest)),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser {
            tokens: tokenize(text)?,
            pos: 0,
            len: text.chars().count(),
        };
        let tree = p.tree()?;
        if let Some(t) = p.peek() {
            return Err(Error::Parse {
                column: t.column,
                message: format!("unexpected '{}'", t.kind),
            });
        }
        Ok(tree)
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<usize>) {
        match self {
            PartitionTree::Leaf(k) => out.push(*k),
            PartitionTree::Split(l, r) => {
                l.collect(out);
                r.collect(out);
            }
        }
    }

    /// Leaves sorted ascending.
    pub fn sorted_leaves(&self) -> Vec<usize> {
        let mut v = self.leaves();
        v.sort_unstable();
        v
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            PartitionTree::Leaf(_) => 1,
            PartitionTree::Split(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, PartitionTree::Leaf(_))
    }

    /// Requires at least two leaves, all below `n`, none repeated.
    pub fn validate(&self, n: usize) -> Result<()> {
        let leaves = self.leaves();
        if leaves.len() < 2 {
            return Err(Error::MalformedTree(format!(
                "'{self}' needs at least two subsystems"
            )));
        }
        if let Some(&bad) = leaves.iter().find(|&&k| k >= n) {
            return Err(Error::MalformedTree(format!(
                "subsystem {} does not exist in a {n}-partite state",
                subsystem_letter(bad)
            )));
        }
        let mut seen = leaves.clone();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::MalformedTree(format!(
                "subsystem {} appears twice in '{self}'",
                subsystem_letter(w[0])
            )));
        }
        Ok(())
    }

    /// For a three-leaf tree with one leaf at the root: that leaf.
    pub fn distinguished(&self) -> Option<usize> {
        match self {
            PartitionTree::Split(l, r) if self.leaf_count() == 3 => match (&**l, &**r) {
                (PartitionTree::Leaf(k), _) | (_, PartitionTree::Leaf(k)) => Some(*k),
                _ => None,
            },
            _ => None,
        }
    }

    /// Same shape with every leaf `k` replaced by `map[k]`.
    pub fn relabel(&self, map: &[usize]) -> Self {
        match self {
            PartitionTree::Leaf(k) => PartitionTree::Leaf(map[*k]),
            PartitionTree::Split(l, r) => Self::split(l.relabel(map), r.relabel(map)),
        }
    }
}

impl fmt::Display for PartitionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionTree::Leaf(k) => f.write_str(&subsystem_letter(*k)),
            PartitionTree::Split(l, r) => {
                let side = |t: &PartitionTree| {
                    if t.is_leaf() {
                        t.to_string()
                    } else {
                        format!("({t})")
                    }
                };
                write!(f, "{}|{}", side(l), side(r))
            }
        }
    }
}

impl std::str::FromStr for PartitionTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// `A₁|A₂…A_N` with the remainder as a chain.
pub fn preset_nc1(n: usize) -> Option<PartitionTree> {
    (n >= 2).then(|| PartitionTree::chain(&(0..n).collect::<Vec<_>>()))
}

/// `A₁A₂|A₃…A_N` (N ≥ 4).
pub fn preset_nc2(n: usize) -> Option<PartitionTree> {
    (n >= 4).then(|| {
        PartitionTree::split(
            PartitionTree::chain(&[0, 1]),
            PartitionTree::chain(&(2..n).collect::<Vec<_>>()),
        )
    })
}

/// Split after ⌊N/2⌋ subsystems, each half a chain (N ≥ 4).
pub fn preset_nc3(n: usize) -> Option<PartitionTree> {
    (n >= 4).then(|| {
        let h = n / 2;
        PartitionTree::split(
            PartitionTree::chain(&(0..h).collect::<Vec<_>>()),
            PartitionTree::chain(&(h..n).collect::<Vec<_>>()),
        )
    })
}

/// Resolves `nc1`, `nc2`, `nc3` for an N-partite state, otherwise parses.
pub fn resolve(text: &str, n: usize) -> Result<PartitionTree> {
    let preset = match text.trim() {
        "nc1" => Some(preset_nc1(n)),
        "nc2" => Some(preset_nc2(n)),
        "nc3" => Some(preset_nc3(n)),
        _ => None,
    };
    match preset {
        Some(Some(t)) => Ok(t),
        Some(None) => Err(Error::MalformedTree(format!(
            "preset '{}' is not defined for {n} subsystems",
            text.trim()
        ))),
        None => PartitionTree::parse(text),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Label(usize),
    Bar,
    Open,
    Close,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Label(k) => write!(f, "{}", subsystem_letter(*k)),
            TokenKind::Bar => f.write_str("|"),
            TokenKind::Open => f.write_str("("),
            TokenKind::Close => f.write_str(")"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let column = i + 1;
        let kind = match ch {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '|' => TokenKind::Bar,
            '(' => TokenKind::Open,
            ')' => TokenKind::Close,
            'A'..='Z' => TokenKind::Label(ch as usize - 'A' as usize),
            'a'..='z' => TokenKind::Label(ch as usize - 'a' as usize),
            '0'..='9' => {
                let start = i;
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..=i].iter().collect();
                let k = s.parse().map_err(|_| Error::Parse {
                    column,
                    message: format!("index '{s}' too large"),
                })?;
                TokenKind::Label(k)
            }
            other => {
                return Err(Error::Parse {
                    column,
                    message: format!("unexpected character '{other}'"),
                })
            }
        };
        out.push(Token { kind, column });
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn end_column(&self) -> usize {
        self.len + 1
    }

    fn tree(&mut self) -> Result<PartitionTree> {
        let left = self.chain()?;
        if matches!(
            self.peek(),
            Some(Token {
                kind: TokenKind::Bar,
                ..
            })
        ) {
            self.pos += 1;
            let right = self.tree()?;
            return Ok(PartitionTree::split(left, right));
        }
        Ok(left)
    }

    fn chain(&mut self) -> Result<PartitionTree> {
        let mut atoms = vec![self.atom()?];
        while matches!(
            self.peek(),
            Some(Token {
                kind: TokenKind::Label(_) | TokenKind::Open,
                ..
            })
        ) {
            atoms.push(self.atom()?);
        }
        let mut it = atoms.into_iter().rev();
        let last = it.next().expect("at least one atom");
        Ok(it.fold(last, |acc, a| PartitionTree::split(a, acc)))
    }

    fn atom(&mut self) -> Result<PartitionTree> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => {
                return Err(Error::Parse {
                    column: self.end_column(),
                    message: "expected a subsystem or '('".into(),
                })
            }
        };
        self.pos += 1;
        match tok.kind {
            TokenKind::Label(k) => Ok(PartitionTree::Leaf(k)),
            TokenKind::Open => {
                let inner = self.tree()?;
                match self.peek() {
                    Some(Token {
                        kind: TokenKind::Close,
                        ..
                    }) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    Some(t) => Err(Error::Parse {
                        column: t.column,
                        message: format!("expected ')' but found '{}'", t.kind),
                    }),
                    None => Err(Error::Parse {
                        column: self.end_column(),
                        message: format!("unclosed '(' opened at column {}", tok.column),
                    }),
                }
            }
            other => Err(Error::Parse {
                column: tok.column,
                message: format!("expected a subsystem or '(' but found '{other}'"),
            }),
        }
    }
}
