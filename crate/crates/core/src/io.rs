//! Line-oriented text formats for instances, assignments and X3C instances.
//!
//! ```text
//! # Example instance
//! posts a1 a2
//! agent v1 : a1@1 > a2@1 = a1@2
//! ```
//!
//! `>` separates indifference tiers (strictly better first) and `=` joins
//! tuples within a tier. Assignments use `assign <post> : <agent>*` lines and
//! X3C instances use `elements <count>` followed by `set <id> : <e>...` lines,
//! with elements numbered from 1.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{AgentId, Assignment, Instance, ModelError, PostId, Tier, Tuple};
use crate::reductions::{X3cInstance, X3cSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TokenKind<'a> {
    Word(&'a str),
    Colon,
    Better,
    Tie,
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    kind: TokenKind<'a>,
    column: usize,
}

fn is_punct(c: char) -> bool {
    matches!(c, ':' | '>' | '=')
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let line = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut tokens = Vec::new();
    let mut chars = line.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let column = line[..start].chars().count() + 1;
        if is_punct(c) {
            chars.next();
            let kind = match c {
                ':' => TokenKind::Colon,
                '>' => TokenKind::Better,
                _ => TokenKind::Tie,
            };
            tokens.push(Token { kind, column });
            continue;
        }
        let mut end = start;
        while let Some(&(i, c)) = chars.peek() {
            if c.is_whitespace() || is_punct(c) {
                break;
            }
            end = i + c.len_utf8();
            chars.next();
        }
        tokens.push(Token {
            kind: TokenKind::Word(&line[start..end]),
            column,
        });
    }
    tokens
}

struct Cursor<'a> {
    line: usize,
    end_column: usize,
    tokens: Vec<Token<'a>>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(line_no: usize, text: &'a str) -> Self {
        Self {
            line: line_no,
            end_column: text.chars().count() + 1,
            tokens: tokenize(text),
            pos: 0,
        }
    }

    fn error<T>(&self, column: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            line: self.line,
            column,
            message: message.into(),
        })
    }

    fn column(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map_or(self.end_column, |t| t.column)
    }

    fn peek(&self) -> Option<Token<'a>> {
        self.tokens.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<Token<'a>> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn word(&mut self, what: &str) -> Result<(&'a str, usize), ParseError> {
        let column = self.column();
        match self.next() {
            Some(Token {
                kind: TokenKind::Word(w),
                ..
            }) => Ok((w, column)),
            _ => self.error(column, format!("expected {what}")),
        }
    }

    fn colon(&mut self) -> Result<(), ParseError> {
        let column = self.column();
        match self.next() {
            Some(Token {
                kind: TokenKind::Colon,
                ..
            }) => Ok(()),
            _ => self.error(column, "expected `:`"),
        }
    }

    fn words(&mut self, what: &str) -> Result<Vec<(&'a str, usize)>, ParseError> {
        let mut out = Vec::new();
        while let Some(tok) = self.next() {
            match tok.kind {
                TokenKind::Word(w) => out.push((w, tok.column)),
                _ => return self.error(tok.column, format!("expected {what}")),
            }
        }
        Ok(out)
    }

    fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

fn parse_positive(cur: &Cursor<'_>, text: &str, column: usize) -> Result<usize, ParseError> {
    match text.parse::<usize>() {
        Ok(d) if d > 0 => Ok(d),
        _ => cur.error(column, format!("expected a positive integer, found `{text}`")),
    }
}

/// Parses the instance grammar. Semantic checks on the lists are left to
/// [`Instance::validate`].
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut posts: Option<Vec<String>> = None;
    let mut agents: Vec<String> = Vec::new();
    let mut seen_agents = HashSet::new();
    let mut prefs: Vec<Vec<Tier>> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let mut cur = Cursor::new(line_no, raw);
        if cur.is_empty() {
            continue;
        }
        let (keyword, kw_col) = cur.word("`posts` or `agent`")?;
        match keyword {
            "posts" => {
                if posts.is_some() {
                    return cur.error(kw_col, "`posts` declared twice");
                }
                let names = cur.words("a post identifier")?;
                if names.is_empty() {
                    return cur.error(cur.end_column, "expected at least one post");
                }
                let mut seen = HashSet::new();
                for &(name, col) in &names {
                    if !seen.insert(name) {
                        return cur.error(col, format!("duplicate post `{name}`"));
                    }
                }
                posts = Some(names.into_iter().map(|(n, _)| n.to_string()).collect());
            }
            "agent" => {
                let Some(post_names) = posts.as_ref() else {
                    return cur.error(kw_col, "`agent` before `posts`");
                };
                let (name, name_col) = cur.word("an agent identifier")?;
                if !seen_agents.insert(name.to_string()) {
                    return cur.error(name_col, format!("duplicate agent `{name}`"));
                }
                cur.colon()?;
                let tiers = parse_tiers(&mut cur, post_names)?;
                agents.push(name.to_string());
                prefs.push(tiers);
            }
            other => return cur.error(kw_col, format!("unknown keyword `{other}`")),
        }
    }

    let Some(posts) = posts else {
        return Err(ParseError::Syntax {
            line: last_line.max(1),
            column: 1,
            message: "missing `posts` line".into(),
        });
    };
    if agents.is_empty() {
        return Err(ParseError::Syntax {
            line: last_line.max(1),
            column: 1,
            message: "no `agent` lines".into(),
        });
    }
    Ok(Instance::new(posts, agents, prefs)?)
}

fn parse_tiers(cur: &mut Cursor<'_>, posts: &[String]) -> Result<Vec<Tier>, ParseError> {
    let mut tiers = Vec::new();
    let mut tier: Tier = Vec::new();
    let mut expect_tuple = true;
    loop {
        let column = cur.column();
        let Some(tok) = cur.next() else {
            if expect_tuple {
                return cur.error(column, "expected a tuple `<post>@<congestion>`");
            }
            tiers.push(tier);
            return Ok(tiers);
        };
        match (tok.kind, expect_tuple) {
            (TokenKind::Word(w), true) => {
                let Some((post, d)) = w.rsplit_once('@') else {
                    return cur.error(column, format!("expected `<post>@<congestion>`, found `{w}`"));
                };
                let Some(p) = posts.iter().position(|x| x == post) else {
                    return cur.error(column, format!("unknown post `{post}`"));
                };
                let d_col = column + post.chars().count() + 1;
                let d = parse_positive(cur, d, d_col)?;
                let t = Tuple::new(PostId(p), d);
                if tier.contains(&t) {
                    return cur.error(column, format!("tuple `{w}` repeated within a tier"));
                }
                tier.push(t);
                expect_tuple = false;
            }
            (TokenKind::Tie, false) => expect_tuple = true,
            (TokenKind::Better, false) => {
                tiers.push(std::mem::take(&mut tier));
                expect_tuple = true;
            }
            (_, true) => return cur.error(column, "expected a tuple `<post>@<congestion>`"),
            (_, false) => return cur.error(column, "expected `>` or `=`"),
        }
    }
}

/// Canonical text form: tiers in list order, tuples within a tier sorted by
/// (post index, congestion).
pub fn write_instance(inst: &Instance) -> String {
    let mut out = String::new();
    out.push_str("posts");
    for name in inst.post_names() {
        out.push(' ');
        out.push_str(name);
    }
    out.push('\n');
    for v in inst.agents() {
        let _ = write!(out, "agent {} :", inst.agent_name(v));
        for (i, tier) in inst.preferences(v).tiers().iter().enumerate() {
            if i > 0 {
                out.push_str(" >");
            }
            let mut sorted = tier.clone();
            sorted.sort();
            for (j, t) in sorted.iter().enumerate() {
                if j > 0 {
                    out.push_str(" =");
                }
                let _ = write!(out, " {}@{}", inst.post_name(t.post), t.congestion);
            }
        }
        out.push('\n');
    }
    out
}

/// Parses `assign <post> : <agent>*` lines against `inst`. Posts without a
/// line stay empty; every agent must be placed exactly once.
pub fn parse_assignment(text: &str, inst: &Instance) -> Result<Assignment, ParseError> {
    let mut blocks: Vec<Vec<AgentId>> = vec![Vec::new(); inst.num_posts()];
    let mut owner: Vec<Option<PostId>> = vec![None; inst.num_agents()];
    let mut seen_posts = HashSet::new();
    let mut last_line = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let mut cur = Cursor::new(line_no, raw);
        if cur.is_empty() {
            continue;
        }
        let (keyword, kw_col) = cur.word("`assign`")?;
        if keyword != "assign" {
            return cur.error(kw_col, format!("unknown keyword `{keyword}`"));
        }
        let (post, post_col) = cur.word("a post identifier")?;
        let Ok(a) = inst.post_id(post) else {
            return cur.error(post_col, format!("unknown post `{post}`"));
        };
        if !seen_posts.insert(a) {
            return cur.error(post_col, format!("post `{post}` assigned twice"));
        }
        cur.colon()?;
        for (name, col) in cur.words("an agent identifier")? {
            let Ok(v) = inst.agent_id(name) else {
                return cur.error(col, format!("unknown agent `{name}`"));
            };
            if owner[v.0].is_some() {
                return cur.error(col, format!("agent `{name}` placed twice"));
            }
            owner[v.0] = Some(a);
            blocks[a.0].push(v);
        }
    }
    if let Some(v) = owner.iter().position(Option::is_none) {
        return Err(ParseError::Syntax {
            line: last_line,
            column: 1,
            message: format!("agent `{}` is not assigned", inst.agent_name(AgentId(v))),
        });
    }
    for block in &mut blocks {
        block.sort();
    }
    Ok(Assignment::from_blocks(inst.num_agents(), blocks)?)
}

pub fn write_assignment(inst: &Instance, assignment: &Assignment) -> String {
    let mut out = String::new();
    for a in inst.posts() {
        let _ = write!(out, "assign {} :", inst.post_name(a));
        for &v in assignment.block(a) {
            out.push(' ');
            out.push_str(inst.agent_name(v));
        }
        out.push('\n');
    }
    out
}

/// Parses `elements <count>` followed by `set <id> : <e>...` lines.
pub fn parse_x3c(text: &str) -> Result<X3cInstance, ParseError> {
    let mut elements: Option<usize> = None;
    let mut sets = Vec::new();
    let mut ids = HashSet::new();
    let mut last_line = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let mut cur = Cursor::new(line_no, raw);
        if cur.is_empty() {
            continue;
        }
        let (keyword, kw_col) = cur.word("`elements` or `set`")?;
        match keyword {
            "elements" => {
                if elements.is_some() {
                    return cur.error(kw_col, "`elements` declared twice");
                }
                let (count, col) = cur.word("an element count")?;
                let Ok(count) = count.parse::<usize>() else {
                    return cur.error(col, format!("expected an element count, found `{count}`"));
                };
                if let Some(tok) = cur.peek() {
                    return cur.error(tok.column, "unexpected token after element count");
                }
                elements = Some(count);
            }
            "set" => {
                if elements.is_none() {
                    return cur.error(kw_col, "`set` before `elements`");
                }
                let (id, id_col) = cur.word("a set identifier")?;
                if !ids.insert(id.to_string()) {
                    return cur.error(id_col, format!("duplicate set `{id}`"));
                }
                cur.colon()?;
                let mut members = Vec::new();
                for (e, col) in cur.words("an element number")? {
                    members.push(parse_positive(&cur, e, col)?);
                }
                sets.push(X3cSet {
                    id: id.to_string(),
                    elements: members,
                });
            }
            other => return cur.error(kw_col, format!("unknown keyword `{other}`")),
        }
    }
    let Some(element_count) = elements else {
        return Err(ParseError::Syntax {
            line: last_line,
            column: 1,
            message: "missing `elements` line".into(),
        });
    };
    Ok(X3cInstance {
        element_count,
        sets,
    })
}

pub fn write_x3c(x: &X3cInstance) -> String {
    let mut out = format!("elements {}\n", x.element_count);
    for set in &x.sets {
        let _ = write!(out, "set {} :", set.id);
        for e in &set.elements {
            let _ = write!(out, " {e}");
        }
        out.push('\n');
    }
    out
}
