//! Line-level grammar of `.agd` files. Produces unresolved declarations;
//! expressions stay as source text until the patch is known.

use super::LoadError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Loc {
    pub line: usize,
    pub column: usize,
}

/// An expression as written, with the location of its first character.
#[derive(Clone, Debug)]
pub struct Src {
    pub text: String,
    pub loc: Loc,
}

/// `key [key2]: e1, e2, ...`
#[derive(Clone, Debug)]
pub struct Entry {
    pub keys: Vec<Src>,
    pub values: Vec<Src>,
    pub loc: Loc,
}

#[derive(Clone, Debug)]
pub enum MorphismBody {
    Anchor,
    Identity,
    Zero,
    Maps(Vec<Entry>),
}

#[derive(Clone, Debug)]
pub enum ExtensionSource {
    Named(Src),
    Mackenzie { f: Src, e: Src, nabla: Src, zeta: Src },
}

#[derive(Clone, Debug)]
pub enum DeclKind {
    Patch(Vec<Src>),
    Tangent,
    Algebroid {
        frame: Option<(Vec<Src>, Loc)>,
        anchors: Vec<Entry>,
        brackets: Vec<Entry>,
    },
    Morphism {
        source: Src,
        target: Src,
        body: MorphismBody,
    },
    Connection {
        f: Src,
        e: Src,
        gammas: Vec<Entry>,
    },
    Form2 {
        f: Src,
        e: Src,
        entries: Vec<Entry>,
    },
    Form1 {
        f: Src,
        e: Src,
        entries: Vec<Entry>,
    },
    Adjustment {
        fields: Vec<(Src, Src)>,
    },
    Pullback {
        from: Src,
        fibre: Vec<Src>,
        actions: Vec<Entry>,
    },
    Extension(ExtensionSource),
    Task {
        op: Src,
        args: Vec<Src>,
    },
}

#[derive(Clone, Debug)]
pub struct Decl {
    /// Empty for `patch`.
    pub name: Src,
    pub kind: DeclKind,
    pub loc: Loc,
}

struct Line<'a> {
    number: usize,
    /// Comment stripped, trailing whitespace kept out.
    text: &'a str,
}

impl Line<'_> {
    fn err(&self, column: usize, message: impl Into<String>) -> LoadError {
        LoadError::at(self.number, column, message)
    }

    fn loc(&self, offset: usize) -> Loc {
        Loc {
            line: self.number,
            column: offset + 1,
        }
    }

    /// Whitespace-separated words with byte offsets.
    fn words(&self, from: usize) -> Vec<Src> {
        split_words(&self.text[from..], from)
            .into_iter()
            .map(|(o, w)| self.src(o, w))
            .collect()
    }

    fn src(&self, offset: usize, text: &str) -> Src {
        Src {
            text: text.to_string(),
            loc: self.loc(offset),
        }
    }
}

fn split_words(s: &str, base: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in s.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(st)) => {
                out.push((base + st, &s[st..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(st) = start {
        out.push((base + st, &s[st..]));
    }
    out
}

fn strip_comment(s: &str) -> &str {
    match s.find('#') {
        Some(i) => &s[..i],
        None => s,
    }
    .trim_end()
}

pub fn parse_decls(source: &str) -> Result<Vec<Decl>, LoadError> {
    let lines: Vec<Line> = source
        .lines()
        .enumerate()
        .map(|(i, t)| Line {
            number: i + 1,
            text: strip_comment(t),
        })
        .filter(|l| !l.text.trim().is_empty())
        .collect();
    let mut decls = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let line = &lines[i];
        i += 1;
        let words = line.words(0);
        let head = &words[0];
        let loc = head.loc;
        let need_name = |w: &[Src]| -> Result<Src, LoadError> {
            let n = w
                .get(1)
                .ok_or_else(|| line.err(head.loc.column, format!("`{}` needs a name", head.text)))?;
            let name = n.text.trim_end_matches(':');
            if !crate::symexpr::is_identifier(name) {
                return Err(line.err(n.loc.column, format!("invalid name `{}`", n.text)));
            }
            Ok(Src {
                text: name.to_string(),
                loc: n.loc,
            })
        };
        let kind = match head.text.as_str() {
            "patch" => {
                if words.len() < 2 {
                    return Err(line.err(loc.column, "`patch` needs at least one coordinate"));
                }
                decls.push(Decl {
                    name: Src {
                        text: String::new(),
                        loc,
                    },
                    kind: DeclKind::Patch(words[1..].to_vec()),
                    loc,
                });
                continue;
            }
            "algebroid" => {
                let name = need_name(&words)?;
                match words.get(2).map(|w| w.text.as_str()) {
                    Some("tangent") if words.len() == 3 => {
                        decls.push(Decl {
                            name,
                            kind: DeclKind::Tangent,
                            loc,
                        });
                        continue;
                    }
                    None => {}
                    Some(_) => return Err(line.err(words[2].loc.column, "expected `tangent` or end of line")),
                }
                let body = block(&lines, &mut i, line)?;
                let mut frame = None;
                let mut anchors = Vec::new();
                let mut brackets = Vec::new();
                for l in body {
                    let w = l.words(0);
                    match w[0].text.as_str() {
                        "frame" => {
                            if frame.is_some() {
                                return Err(l.err(w[0].loc.column, "frame declared twice"));
                            }
                            frame = Some((w[1..].to_vec(), w[0].loc));
                        }
                        "anchor" => anchors.push(entry(l, 1)?),
                        "bracket" => brackets.push(entry(l, 2)?),
                        other => return Err(l.err(w[0].loc.column, format!("unknown algebroid line `{other}`"))),
                    }
                }
                DeclKind::Algebroid {
                    frame,
                    anchors,
                    brackets,
                }
            }
            "morphism" | "connection" | "form2" | "form1" => {
                let sig = signature(line, &words, head.text == "connection")?;
                let (src, tgt, rest) = sig;
                let keyword = rest.map(|r| r.text.clone());
                let inline = keyword.is_some();
                let body = if inline {
                    Vec::new()
                } else {
                    block(&lines, &mut i, line)?
                };
                let collect = |tag: &str, keys: usize| -> Result<Vec<Entry>, LoadError> {
                    body.iter()
                        .map(|l| {
                            let w = l.words(0);
                            if w[0].text != tag {
                                return Err(l.err(w[0].loc.column, format!("expected `{tag}`")));
                            }
                            entry(l, keys)
                        })
                        .collect()
                };
                let bad_keyword = |allowed: &str| {
                    let r = rest.expect("inline");
                    line.err(
                        r.loc.column,
                        format!("expected {allowed} or a block, found `{}`", r.text),
                    )
                };
                match (head.text.as_str(), keyword.as_deref()) {
                    ("morphism", None) => DeclKind::Morphism {
                        source: src,
                        target: tgt,
                        body: MorphismBody::Maps(collect("map", 1)?),
                    },
                    ("morphism", Some(k)) => {
                        let body = match k {
                            "anchor" => MorphismBody::Anchor,
                            "identity" => MorphismBody::Identity,
                            "zero" => MorphismBody::Zero,
                            _ => return Err(bad_keyword("`anchor`, `identity`, `zero`")),
                        };
                        DeclKind::Morphism {
                            source: src,
                            target: tgt,
                            body,
                        }
                    }
                    ("connection", k) => {
                        if k.is_some() && k != Some("flat") {
                            return Err(bad_keyword("`flat`"));
                        }
                        DeclKind::Connection {
                            f: src,
                            e: tgt,
                            gammas: collect("gamma", 2)?,
                        }
                    }
                    ("form2", k) => {
                        if k.is_some() && k != Some("zero") {
                            return Err(bad_keyword("`zero`"));
                        }
                        DeclKind::Form2 {
                            f: src,
                            e: tgt,
                            entries: collect("zeta", 2)?,
                        }
                    }
                    (_, k) => {
                        if k.is_some() && k != Some("zero") {
                            return Err(bad_keyword("`zero`"));
                        }
                        DeclKind::Form1 {
                            f: src,
                            e: tgt,
                            entries: collect("at", 1)?,
                        }
                    }
                }
            }
            "adjustment" => {
                if let Some(w) = words.get(2) {
                    return Err(line.err(w.loc.column, "unexpected text after adjustment name"));
                }
                let mut fields = Vec::new();
                for l in block(&lines, &mut i, line)? {
                    let w = l.words(0);
                    if w.len() != 3 || w[1].text != "=" {
                        return Err(l.err(w[0].loc.column, "expected `key = name`"));
                    }
                    fields.push((w[0].clone(), w[2].clone()));
                }
                DeclKind::Adjustment { fields }
            }
            "pullback" => {
                if words.len() != 4 || words[2].text != "from" {
                    return Err(line.err(loc.column, "expected `pullback NAME from ADJUSTMENT`"));
                }
                let mut fibre = Vec::new();
                let mut actions = Vec::new();
                for l in block(&lines, &mut i, line)? {
                    let w = l.words(0);
                    match w[0].text.as_str() {
                        "fibre" => fibre.extend(w[1..].iter().cloned()),
                        "action" => actions.push(entry(l, 1)?),
                        other => return Err(l.err(w[0].loc.column, format!("unknown pullback line `{other}`"))),
                    }
                }
                DeclKind::Pullback {
                    from: words[3].clone(),
                    fibre,
                    actions,
                }
            }
            "extension" => {
                let name = need_name(&words)?;
                let eq = line
                    .text
                    .find('=')
                    .ok_or_else(|| line.err(loc.column, "expected `extension NAME = SOURCE`"))?;
                let rhs = &line.text[eq + 1..];
                let rhs_off = eq + 1 + (rhs.len() - rhs.trim_start().len());
                let rhs = rhs.trim();
                let source = if let Some(inner) = rhs.strip_prefix("mackenzie(").and_then(|r| r.strip_suffix(')')) {
                    let args = comma_list(line, rhs_off + "mackenzie(".len(), inner);
                    if args.len() != 4 {
                        return Err(line.err(rhs_off + 1, "mackenzie(F, E, connection, form2) takes four names"));
                    }
                    let mut it = args.into_iter();
                    let mut next = || it.next().expect("four");
                    ExtensionSource::Mackenzie {
                        f: next(),
                        e: next(),
                        nabla: next(),
                        zeta: next(),
                    }
                } else if crate::symexpr::is_identifier(rhs) {
                    ExtensionSource::Named(line.src(rhs_off, rhs))
                } else {
                    return Err(line.err(rhs_off + 1, format!("cannot read extension source `{rhs}`")));
                };
                let name_end = name.loc.column - 1 + name.text.len();
                if line.text[name_end..eq].trim() != "" {
                    return Err(line.err(name_end + 1, "expected `=` after the extension name"));
                }
                decls.push(Decl {
                    name,
                    kind: DeclKind::Extension(source),
                    loc,
                });
                continue;
            }
            "task" => {
                let colon = line
                    .text
                    .find(':')
                    .ok_or_else(|| line.err(loc.column, "expected `task NAME: OP ARGS`"))?;
                let rest = line.words(colon + 1);
                if rest.is_empty() {
                    return Err(line.err(colon + 2, "task needs an operation"));
                }
                DeclKind::Task {
                    op: rest[0].clone(),
                    args: rest[1..].to_vec(),
                }
            }
            "end" => return Err(line.err(loc.column, "`end` without an open block")),
            other => return Err(line.err(loc.column, format!("unknown declaration `{other}`"))),
        };
        let name = need_name(&words)?;
        decls.push(Decl { name, kind, loc });
    }
    Ok(decls)
}

/// Lines up to the matching `end`.
fn block<'a, 'b>(lines: &'b [Line<'a>], i: &mut usize, opener: &Line) -> Result<Vec<&'b Line<'a>>, LoadError> {
    let mut body = Vec::new();
    while *i < lines.len() {
        let l = &lines[*i];
        *i += 1;
        if l.text.trim() == "end" {
            return Ok(body);
        }
        body.push(l);
    }
    Err(opener.err(1, "block is not closed by `end`"))
}

/// `NAME: SRC -> TGT [keyword]` or, for connections, `NAME: F on E [keyword]`.
fn signature<'w>(line: &Line, words: &'w [Src], connection: bool) -> Result<(Src, Src, Option<&'w Src>), LoadError> {
    let arrow = if connection { "on" } else { "->" };
    let usage = if connection {
        "NAME: F on E"
    } else {
        "NAME: SOURCE -> TARGET"
    };
    if !words[1].text.ends_with(':') || words.len() < 5 || words[3].text != arrow || words.len() > 6 {
        return Err(line.err(words[0].loc.column, format!("expected `{} {usage}`", words[0].text)));
    }
    Ok((words[2].clone(), words[4].clone(), words.get(5)))
}

/// `tag k1 [k2]: v1, v2, ...` with `keys` leading names.
fn entry(line: &Line, keys: usize) -> Result<Entry, LoadError> {
    let colon = line
        .text
        .find(':')
        .ok_or_else(|| line.err(1, "expected `:` before the component list"))?;
    let head = split_words(&line.text[..colon], 0);
    if head.len() != keys + 1 {
        return Err(line.err(
            head[0].0 + 1,
            format!("`{}` takes {keys} frame name(s) before `:`", head[0].1),
        ));
    }
    let values = comma_list(line, colon + 1, &line.text[colon + 1..]);
    if values.iter().any(|v| v.text.is_empty()) {
        return Err(line.err(colon + 2, "empty component"));
    }
    Ok(Entry {
        keys: head[1..].iter().map(|(o, w)| line.src(*o, w)).collect(),
        values,
        loc: line.loc(head[0].0),
    })
}

fn comma_list(line: &Line, base: usize, s: &str) -> Vec<Src> {
    let mut out = Vec::new();
    let mut off = 0;
    for piece in s.split(',') {
        let lead = piece.len() - piece.trim_start().len();
        out.push(line.src(base + off + lead, piece.trim()));
        off += piece.len() + 1;
    }
    out
}
