use std::fmt;
use std::str::FromStr;

use super::{parse_cycle_list, PermGroup, Permutation};
use crate::error::{Error, Result};

/// Named permutation-group families accepted wherever a group is expected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedFamily {
    Symmetric(usize),
    Alternating(usize),
    Cyclic(usize),
    /// Order `2n` acting on `n` points.
    Dihedral(usize),
    Klein4,
    Trivial(usize),
    Frobenius20,
}

impl NamedFamily {
    pub fn degree(&self) -> usize {
        match *self {
            NamedFamily::Symmetric(n)
            | NamedFamily::Alternating(n)
            | NamedFamily::Cyclic(n)
            | NamedFamily::Dihedral(n)
            | NamedFamily::Trivial(n) => n,
            NamedFamily::Klein4 => 4,
            NamedFamily::Frobenius20 => 5,
        }
    }

    /// Standard generators, 0-indexed.
    pub fn generator_cycles(&self) -> Vec<Vec<Vec<usize>>> {
        let full = |n: usize| vec![(0..n).collect::<Vec<_>>()];
        match *self {
            NamedFamily::Symmetric(n) if n >= 3 => vec![vec![vec![0, 1]], full(n)],
            NamedFamily::Symmetric(2) => vec![vec![vec![0, 1]]],
            NamedFamily::Alternating(n) if n >= 4 && n % 2 == 1 => {
                vec![vec![vec![0, 1, 2]], full(n)]
            }
            NamedFamily::Alternating(n) if n >= 4 => {
                vec![vec![vec![0, 1, 2]], vec![(1..n).collect()]]
            }
            NamedFamily::Alternating(3) => vec![vec![vec![0, 1, 2]]],
            NamedFamily::Cyclic(n) if n >= 2 => vec![full(n)],
            NamedFamily::Dihedral(n) => {
                let reflection: Vec<Vec<usize>> = (1..n)
                    .filter(|&i| i < n - i)
                    .map(|i| vec![i, n - i])
                    .collect();
                vec![full(n), reflection]
            }
            NamedFamily::Klein4 => vec![vec![vec![0, 1], vec![2, 3]], vec![vec![0, 2], vec![1, 3]]],
            NamedFamily::Frobenius20 => vec![vec![vec![0, 1, 2, 3, 4]], vec![vec![1, 2, 4, 3]]],
            _ => vec![],
        }
    }

    pub fn group(&self) -> Result<PermGroup> {
        let n = self.degree();
        if n == 0 {
            return Err(Error::Input(format!("{self}: degree must be positive")));
        }
        if let NamedFamily::Dihedral(k) = self {
            if *k < 3 {
                return Err(Error::Input(format!(
                    "Dih({k}) would have order {} on {k} points; use n >= 3",
                    2 * k
                )));
            }
        }
        let gens = self
            .generator_cycles()
            .iter()
            .map(|c| Permutation::from_cycles(n, c))
            .collect::<Result<Vec<_>>>()?;
        PermGroup::new(n, gens)
    }
}

impl fmt::Display for NamedFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedFamily::Symmetric(n) => write!(f, "Sym({n})"),
            NamedFamily::Alternating(n) => write!(f, "Alt({n})"),
            NamedFamily::Cyclic(n) => write!(f, "Cyc({n})"),
            NamedFamily::Dihedral(n) => write!(f, "Dih({n})"),
            NamedFamily::Klein4 => write!(f, "Klein4"),
            NamedFamily::Trivial(n) => write!(f, "Triv({n})"),
            NamedFamily::Frobenius20 => write!(f, "F20"),
        }
    }
}

/// A group description: a named family or an explicit generator list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Named(NamedFamily),
    Explicit {
        degree: usize,
        generators: Vec<Permutation>,
    },
}

impl GroupSpec {
    pub fn degree(&self) -> usize {
        match self {
            GroupSpec::Named(f) => f.degree(),
            GroupSpec::Explicit { degree, .. } => *degree,
        }
    }

    pub fn resolve(&self) -> Result<PermGroup> {
        match self {
            GroupSpec::Named(f) => f.group(),
            GroupSpec::Explicit { degree, generators } => {
                PermGroup::new(*degree, generators.clone())
            }
        }
    }

    pub fn from_group(g: &PermGroup) -> GroupSpec {
        GroupSpec::Explicit {
            degree: g.degree(),
            generators: g.generators().to_vec(),
        }
    }

    /// Text form: a family name, or the `degree:` / `gen:` file format.
    pub fn render(&self) -> String {
        match self {
            GroupSpec::Named(f) => f.to_string(),
            GroupSpec::Explicit { degree, generators } => {
                let mut s = format!("degree: {degree}\n");
                for g in generators {
                    s.push_str(&format!("gen: {g}\n"));
                }
                s
            }
        }
    }

    /// Parses a family name or the explicit format. Lines may also be
    /// separated by ` / ` so a whole spec fits on one command line.
    pub fn parse(text: &str) -> Result<GroupSpec> {
        let trimmed = text.trim();
        if let Some(f) = parse_family(trimmed)? {
            return Ok(GroupSpec::Named(f));
        }
        let lines: Vec<&str> = if trimmed.contains('\n') {
            text.lines().collect()
        } else {
            text.split('/').collect()
        };
        let mut degree: Option<usize> = None;
        let mut generators = Vec::new();
        for (i, raw) in lines.iter().enumerate() {
            let line_no = i + 1;
            let indent = raw.len() - raw.trim_start().len();
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once(':').ok_or_else(|| Error::Parse {
                line: line_no,
                column: indent + 1,
                message: format!("expected `degree: <n>` or `gen: <cycles>`, found `{line}`"),
            })?;
            let value_col = indent + key.len() + 2 + (value.len() - value.trim_start().len());
            match key.trim() {
                "degree" => {
                    if degree.is_some() {
                        return Err(Error::Parse {
                            line: line_no,
                            column: indent + 1,
                            message: "duplicate degree line".into(),
                        });
                    }
                    let n: usize = value.trim().parse().map_err(|_| Error::Parse {
                        line: line_no,
                        column: value_col,
                        message: format!("bad degree `{}`", value.trim()),
                    })?;
                    if n == 0 {
                        return Err(Error::Parse {
                            line: line_no,
                            column: value_col,
                            message: "degree must be positive".into(),
                        });
                    }
                    degree = Some(n);
                }
                "gen" => {
                    let n = degree.ok_or_else(|| Error::Parse {
                        line: line_no,
                        column: indent + 1,
                        message: "`gen:` before `degree:`".into(),
                    })?;
                    let cycles = parse_cycle_list(value.trim(), line_no, value_col)?;
                    let zero: Vec<Vec<usize>> = cycles
                        .into_iter()
                        .map(|c| c.into_iter().map(|x| x - 1).collect())
                        .collect();
                    let g = Permutation::from_cycles(n, &zero).map_err(|e| Error::Parse {
                        line: line_no,
                        column: value_col,
                        message: e.to_string(),
                    })?;
                    generators.push(g);
                }
                other => {
                    return Err(Error::Parse {
                        line: line_no,
                        column: indent + 1,
                        message: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        let degree = degree.ok_or_else(|| Error::Parse {
            line: 1,
            column: 1,
            message: format!("`{trimmed}` is neither a group family nor a `degree:` spec"),
        })?;
        Ok(GroupSpec::Explicit { degree, generators })
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GroupSpec::parse(s)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Named(n) => write!(f, "{n}"),
            GroupSpec::Explicit { degree, generators } => {
                write!(f, "degree: {degree}")?;
                for g in generators {
                    write!(f, " / gen: {g}")?;
                }
                Ok(())
            }
        }
    }
}

fn parse_family(s: &str) -> Result<Option<NamedFamily>> {
    match s {
        "Klein4" => return Ok(Some(NamedFamily::Klein4)),
        "F20" => return Ok(Some(NamedFamily::Frobenius20)),
        _ => {}
    }
    let Some(open) = s.find('(') else {
        return Ok(None);
    };
    let name = &s[..open];
    let ctor: fn(usize) -> NamedFamily = match name {
        "Sym" => NamedFamily::Symmetric,
        "Alt" => NamedFamily::Alternating,
        "Cyc" => NamedFamily::Cyclic,
        "Dih" => NamedFamily::Dihedral,
        "Triv" => NamedFamily::Trivial,
        _ => return Ok(None),
    };
    let arg = s[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| Error::Parse {
            line: 1,
            column: s.len(),
            message: format!("missing `)` in `{s}`"),
        })?;
    let n: usize = arg.trim().parse().map_err(|_| Error::Parse {
        line: 1,
        column: open + 2,
        message: format!("bad degree `{arg}`"),
    })?;
    if n == 0 {
        return Err(Error::Parse {
            line: 1,
            column: open + 2,
            message: "degree must be positive".into(),
        });
    }
    Ok(Some(ctor(n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_have_expected_orders() {
        let cases: &[(&str, u64)] = &[
            ("Sym(1)", 1),
            ("Sym(2)", 2),
            ("Sym(5)", 120),
            ("Alt(3)", 3),
            ("Alt(4)", 12),
            ("Alt(5)", 60),
            ("Alt(6)", 360),
            ("Cyc(1)", 1),
            ("Cyc(5)", 5),
            ("Dih(4)", 8),
            ("Dih(5)", 10),
            ("Klein4", 4),
            ("Triv(3)", 1),
            ("F20", 20),
        ];
        for (s, order) in cases {
            let g = GroupSpec::parse(s).unwrap().resolve().unwrap();
            assert_eq!(g.order_u64(), Some(*order), "{s}");
        }
        assert!(GroupSpec::parse("Dih(2)").unwrap().resolve().is_err());
    }

    #[test]
    fn explicit_format() {
        let k = GroupSpec::parse("degree: 4 / gen: (1 2)(3 4) / gen: (1 3)(2 4)").unwrap();
        let g = k.resolve().unwrap();
        assert!(g.same_group(&NamedFamily::Klein4.group().unwrap()));
        let f = GroupSpec::parse("degree: 5\ngen: (1 2 3 4 5)\ngen: (2 3 5 4)\n").unwrap();
        assert_eq!(f.resolve().unwrap().order_u64(), Some(20));
        let id = GroupSpec::parse("degree: 3\ngen: ()").unwrap();
        assert!(id.resolve().unwrap().is_trivial());
    }

    #[test]
    fn render_parses_back() {
        for s in ["Alt(5)", "Klein4", "degree: 4 / gen: (1 2 3) / gen: ()"] {
            let spec = GroupSpec::parse(s).unwrap();
            assert_eq!(GroupSpec::parse(&spec.render()).unwrap(), spec);
            assert_eq!(GroupSpec::parse(&spec.to_string()).unwrap(), spec);
        }
    }

    #[test]
    fn errors_are_located() {
        match GroupSpec::parse("degree: 4\ngen: (1 2)(3 q)") {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(column, 14);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            GroupSpec::parse("gen: (1 2)"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(GroupSpec::parse("Sym(x)").is_err());
        assert!(GroupSpec::parse("Foo").is_err());
    }
}
