//! DIMACS CNF reader.

use thiserror::Error;

use super::formula::{Formula, VarId, VariablePool};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {line}: missing or malformed `p cnf <vars> <clauses>` header")]
    Header { line: usize },
    #[error("line {line}: clause data before the header")]
    DataBeforeHeader { line: usize },
    #[error("line {line}: `{token}` is not an integer literal")]
    BadToken { line: usize, token: String },
    #[error("line {line}: literal {literal} exceeds the {declared} declared variables")]
    LiteralOutOfRange {
        line: usize,
        literal: i64,
        declared: usize,
    },
    #[error("header declares {declared} clauses but {found} were given")]
    ClauseCount { declared: usize, found: usize },
    #[error("last clause is not terminated by 0")]
    MissingTerminator,
}

/// Parses DIMACS CNF text into an and-of-ors formula over variables `x1..=xV`.
///
/// A single clause is returned without the enclosing conjunction, and a
/// unit clause as its bare literal.
pub fn parse_dimacs(text: &str) -> Result<(Formula, VariablePool), DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Formula>> = Vec::new();
    let mut current: Vec<Formula> = Vec::new();
    let mut open = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if header.is_some() || parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(DimacsError::Header { line });
            }
            let vars = parts[2].parse().map_err(|_| DimacsError::Header { line })?;
            let count = parts[3].parse().map_err(|_| DimacsError::Header { line })?;
            header = Some((vars, count));
            continue;
        }
        let Some((declared, _)) = header else {
            return Err(DimacsError::DataBeforeHeader { line });
        };
        for token in trimmed.split_whitespace() {
            let literal: i64 = token.parse().map_err(|_| DimacsError::BadToken {
                line,
                token: token.to_owned(),
            })?;
            if literal == 0 {
                clauses.push(std::mem::take(&mut current));
                open = false;
                continue;
            }
            let index = literal.unsigned_abs() as usize;
            if index > declared {
                return Err(DimacsError::LiteralOutOfRange {
                    line,
                    literal,
                    declared,
                });
            }
            current.push(Formula::lit(VarId(index as u32 - 1), literal > 0));
            open = true;
        }
    }

    let Some((vars, declared)) = header else {
        return Err(DimacsError::Header { line: 1 });
    };
    if open {
        return Err(DimacsError::MissingTerminator);
    }
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCount {
            declared,
            found: clauses.len(),
        });
    }

    let mut clauses: Vec<Formula> = clauses
        .into_iter()
        .map(|mut lits| match lits.len() {
            0 => Formula::False,
            1 => lits.pop().unwrap(),
            _ => Formula::Or(lits),
        })
        .collect();
    let formula = match clauses.len() {
        0 => Formula::True,
        1 => clauses.pop().unwrap(),
        _ => Formula::And(clauses),
    };
    Ok((formula, VariablePool::numbered(vars)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: u32) -> Formula {
        Formula::Var(VarId(i - 1))
    }

    #[test]
    fn single_clause() {
        let (f, pool) = parse_dimacs("p cnf 2 1\n1 -2 0").unwrap();
        assert_eq!(f, Formula::Or(vec![x(1), x(2).not()]));
        assert_eq!(pool.len(), 2);
        assert_eq!(pool.name(VarId(0)), Some("x1"));
    }

    #[test]
    fn unsatisfiable_units() {
        let (f, _) = parse_dimacs("p cnf 1 2\n1 0\n-1 0").unwrap();
        assert_eq!(f, Formula::And(vec![x(1), x(1).not()]));
    }

    #[test]
    fn literal_out_of_range() {
        assert_eq!(
            parse_dimacs("p cnf 2 1\n3 0").unwrap_err(),
            DimacsError::LiteralOutOfRange {
                line: 2,
                literal: 3,
                declared: 2
            }
        );
    }

    #[test]
    fn structural_errors() {
        assert_eq!(
            parse_dimacs("p cnf 2 2\n1 2 0\n").unwrap_err(),
            DimacsError::ClauseCount {
                declared: 2,
                found: 1
            }
        );
        assert_eq!(
            parse_dimacs("p cnf 2 1\n1 2").unwrap_err(),
            DimacsError::MissingTerminator
        );
        assert!(matches!(
            parse_dimacs("1 2 0\n"),
            Err(DimacsError::DataBeforeHeader { line: 1 })
        ));
        assert!(matches!(
            parse_dimacs("p dnf 2 1\n1 0"),
            Err(DimacsError::Header { line: 1 })
        ));
        assert!(matches!(
            parse_dimacs("c only comments\n"),
            Err(DimacsError::Header { .. })
        ));
    }

    #[test]
    fn comments_and_multiline_clauses() {
        let text = "c example\np cnf 3 2\n1 -3\n 2 0 -1\n0\n%\n0\n";
        let (f, _) = parse_dimacs(text).unwrap();
        assert_eq!(
            f,
            Formula::And(vec![Formula::Or(vec![x(1), x(3).not(), x(2)]), x(1).not()])
        );
    }

    #[test]
    fn empty_clause_is_false() {
        let (f, _) = parse_dimacs("p cnf 1 1\n0\n").unwrap();
        assert_eq!(f, Formula::False);
    }
}
