//! Group files: `{"degree": n, "generators": ["(0 1 2)", ...]}`.

use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Permutation;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupFile {
    degree: usize,
    generators: Vec<String>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Line and column of byte offset `at` in `text`, both counted from 1.
fn position(text: &str, at: usize) -> (usize, usize) {
    let before = &text[..at];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses a group file; cycle-notation errors point into the file itself.
pub fn parse_group(text: &str) -> Result<PermGroup> {
    let file: GroupFile = serde_json::from_str(text).map_err(json_error)?;
    let mut gens = Vec::with_capacity(file.generators.len());
    let mut search_from = text.find("\"generators\"").unwrap_or(0);
    for g in &file.generators {
        let quoted = format!("\"{g}\"");
        let start = text[search_from..].find(&quoted).map(|i| search_from + i);
        match Permutation::parse(g, file.degree) {
            Ok(p) => gens.push(p),
            Err(Error::Parse {
                line,
                column,
                message,
            }) => {
                let (line, column) = match start {
                    Some(s) if line == 1 => {
                        let (l, c) = position(text, s + 1);
                        (l, c + column - 1)
                    }
                    _ => (line, column),
                };
                return Err(Error::Parse {
                    line,
                    column,
                    message,
                });
            }
            Err(e) => return Err(e),
        }
        if let Some(s) = start {
            search_from = s + quoted.len();
        }
    }
    PermGroup::new(file.degree, gens)
}

/// The file form of `group`, listing its generators.
pub fn group_to_json(group: &PermGroup) -> Value {
    json!({
        "degree": group.degree(),
        "generators": group.generators().iter().map(ToString::to_string).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g =
            parse_group(r#"{"degree": 5, "generators": ["(0 1 2 3 4)", "(1 4)(2 3)"]}"#).unwrap();
        assert_eq!(g.order(), 10);
        let again = parse_group(&group_to_json(&g).to_string()).unwrap();
        assert!(again.same_group(&g));
        assert_eq!(
            parse_group(r#"{"degree": 3, "generators": []}"#)
                .unwrap()
                .order(),
            1
        );
    }

    #[test]
    fn errors_point_into_the_file() {
        let text = "{\"degree\": 4,\n \"generators\": [\"(0 1)\",\n  \"(0 1 x)\"]}";
        match parse_group(text) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 9)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_group("{\"degree\": 4}"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_group(r#"{"degree": 3, "generators": ["(0 5)"]}"#),
            Err(Error::Parse { .. })
        ));
    }
}
