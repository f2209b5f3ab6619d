//! Edge-list and GML ingestion.

use std::collections::{BTreeSet, HashMap};

use super::{Graph, Labeling};
use crate::error::{Error, Result};

/// Parses a whitespace-separated edge list; `#` lines are comments.
///
/// Node identifiers are arbitrary tokens, mapped to dense indices in order of
/// first appearance. Returns the graph and the identifier of each index.
pub fn load_edge_list(text: &str) -> Result<(Graph, Vec<String>)> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut names: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected two node identifiers, found {}", tokens.len()),
            });
        }
        let mut ends = [0usize; 2];
        for (slot, tok) in ends.iter_mut().zip(&tokens) {
            *slot = *index.entry(tok).or_insert_with(|| {
                names.push((*tok).to_string());
                names.len() - 1
            });
        }
        edges.push((ends[0], ends[1]));
    }
    if edges.is_empty() {
        return Err(Error::EmptyInput("edge list has no edges"));
    }
    Ok((Graph::from_edges(names.len(), edges)?, names))
}

/// Parses an edge list whose identifiers are 0-based node indices, as written
/// by [`write_edge_list`]. The graph has `n` nodes, or one more than the
/// largest index when `n` is `None`.
pub fn load_indexed_edge_list(text: &str, n: Option<usize>) -> Result<Graph> {
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed: Vec<std::result::Result<usize, _>> =
            line.split_whitespace().map(str::parse).collect();
        match parsed.as_slice() {
            [Ok(u), Ok(v)] => edges.push((*u, *v)),
            [_, _] => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("node indices must be nonnegative integers: {line:?}"),
                })
            }
            other => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected two node indices, found {}", other.len()),
                })
            }
        }
    }
    let needed = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = n.unwrap_or(needed);
    if n == 0 {
        return Err(Error::EmptyInput("edge list has no nodes"));
    }
    Graph::from_edges(n, edges)
}

/// Writes each undirected edge once as `u v` with 0-based indices.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// A graph read from GML, with the original node ids and optional node values.
#[derive(Clone, Debug)]
pub struct GmlGraph {
    pub graph: Graph,
    pub ids: Vec<String>,
    /// Present iff every node carries a `value`; distinct values map to
    /// communities in sorted order.
    pub labels: Option<Labeling>,
}

/// Reads the subset of GML used by network repositories:
/// `graph [ node [ id N value V ] ... edge [ source A target B ] ... ]`.
///
/// Unknown keys are skipped, edge direction is ignored.
pub fn load_gml_subset(text: &str) -> Result<GmlGraph> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let top = parser.parse_list(false)?;
    let graph_items = top
        .into_iter()
        .find_map(|(key, value, _)| match (key.as_str(), value) {
            ("graph", Value::List(items)) => Some(items),
            _ => None,
        })
        .ok_or(Error::EmptyInput("no `graph [ ... ]` block"))?;

    let mut ids: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut values: Vec<Option<String>> = Vec::new();
    let mut raw_edges: Vec<(String, String, usize)> = Vec::new();

    for (key, value, line) in graph_items {
        let Value::List(fields) = value else {
            continue;
        };
        match key.as_str() {
            "node" => {
                let id = scalar(&fields, "id").ok_or_else(|| Error::Parse {
                    line,
                    message: "node without id".into(),
                })?;
                if index.contains_key(&id) {
                    return Err(Error::Parse {
                        line,
                        message: format!("duplicate node id {id}"),
                    });
                }
                index.insert(id.clone(), ids.len());
                ids.push(id);
                values.push(scalar(&fields, "value"));
            }
            "edge" => {
                let source = scalar(&fields, "source");
                let target = scalar(&fields, "target");
                match (source, target) {
                    (Some(s), Some(t)) => raw_edges.push((s, t, line)),
                    _ => {
                        return Err(Error::Parse {
                            line,
                            message: "edge needs both source and target".into(),
                        })
                    }
                }
            }
            _ => {}
        }
    }
    if ids.is_empty() {
        return Err(Error::EmptyInput("GML graph has no nodes"));
    }

    let mut edges = Vec::with_capacity(raw_edges.len());
    for (s, t, line) in raw_edges {
        let lookup = |id: &str| {
            index.get(id).copied().ok_or_else(|| Error::Parse {
                line,
                message: format!("edge references unknown node id {id}"),
            })
        };
        edges.push((lookup(&s)?, lookup(&t)?));
    }
    let graph = Graph::from_edges(ids.len(), edges)?;

    let labels = if values.iter().all(Option::is_some) {
        let values: Vec<String> = values.into_iter().flatten().collect();
        Some(values_to_labels(&values))
    } else {
        None
    };
    Ok(GmlGraph { graph, ids, labels })
}

fn values_to_labels(values: &[String]) -> Labeling {
    let numeric: Option<Vec<f64>> = values.iter().map(|v| v.parse::<f64>().ok()).collect();
    let labels = match numeric {
        Some(nums) => {
            let mut distinct = nums.clone();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            nums.iter()
                .map(|x| distinct.partition_point(|d| d < x))
                .collect()
        }
        None => {
            let distinct: Vec<&String> =
                values.iter().collect::<BTreeSet<_>>().into_iter().collect();
            values
                .iter()
                .map(|v| distinct.partition_point(|d| *d < v))
                .collect()
        }
    };
    Labeling::from_labels(labels)
}

fn scalar(fields: &[(String, Value, usize)], key: &str) -> Option<String> {
    fields.iter().find_map(|(k, v, _)| match v {
        Value::Scalar(s) if k == key => Some(s.clone()),
        _ => None,
    })
}

#[derive(Debug)]
enum Token {
    Open(usize),
    Close(usize),
    Word(String, usize),
}

#[derive(Debug)]
enum Value {
    Scalar(String),
    List(Vec<(String, Value, usize)>),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1;
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '[' => {
                tokens.push(Token::Open(line));
                chars.next();
            }
            ']' => {
                tokens.push(Token::Close(line));
                chars.next();
            }
            '"' => {
                let start = line;
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some(c) => {
                            if c == '\n' {
                                line += 1;
                            }
                            s.push(c);
                        }
                        None => {
                            return Err(Error::Parse {
                                line: start,
                                message: "unterminated string".into(),
                            })
                        }
                    }
                }
                tokens.push(Token::Word(s, start));
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '[' || c == ']' || c == '"' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                tokens.push(Token::Word(s, line));
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn parse_list(&mut self, nested: bool) -> Result<Vec<(String, Value, usize)>> {
        let mut items = Vec::new();
        loop {
            let Some(tok) = self.tokens.get(self.pos) else {
                if nested {
                    let line = self.last_line();
                    return Err(Error::Parse {
                        line,
                        message: "unbalanced brackets: missing `]`".into(),
                    });
                }
                return Ok(items);
            };
            match tok {
                Token::Close(line) => {
                    if !nested {
                        return Err(Error::Parse {
                            line: *line,
                            message: "unbalanced brackets: unexpected `]`".into(),
                        });
                    }
                    self.pos += 1;
                    return Ok(items);
                }
                Token::Open(line) => {
                    return Err(Error::Parse {
                        line: *line,
                        message: "expected a key before `[`".into(),
                    })
                }
                Token::Word(key, line) => {
                    let (key, line) = (key.clone(), *line);
                    self.pos += 1;
                    let value = match self.tokens.get(self.pos) {
                        Some(Token::Open(_)) => {
                            self.pos += 1;
                            Value::List(self.parse_list(true)?)
                        }
                        Some(Token::Word(v, _)) => {
                            let v = v.clone();
                            self.pos += 1;
                            Value::Scalar(v)
                        }
                        _ => {
                            return Err(Error::Parse {
                                line,
                                message: format!("key {key} has no value"),
                            })
                        }
                    };
                    items.push((key, value, line));
                }
            }
        }
    }

    fn last_line(&self) -> usize {
        match self.tokens.last() {
            Some(Token::Open(l)) | Some(Token::Close(l)) | Some(Token::Word(_, l)) => *l,
            None => 1,
        }
    }
}
