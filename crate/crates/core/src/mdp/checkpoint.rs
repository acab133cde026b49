//! Versioned plain-text checkpoint of a [`TabularModel`].
//!
//! ```text
//! emql-tabular-model 1
//! states <|S|>
//! actions <|A|>
//! gamma <g>
//! r_max <r>
//! visits            (|S| lines of |A| integers)
//! reward_sums       (|S| lines of |A| reals)
//! r_hat             (|S| lines of |A| reals)
//! q                 (|S| lines of |A| reals)
//! v                 (1 line of |S| reals)
//! transitions <n>   (n lines: s a s' count)
//! p_hat <n>         (n lines: s a s' value)
//! end
//! ```
//!
//! Reals are written with the shortest representation that parses back to
//! the same bits, so a save/load cycle is exact.

use std::io::{BufRead, Write};

use super::model::OwnedParts;
use super::{MdpSpec, TabularModel};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const CHECKPOINT_MAGIC: &str = "emql-tabular-model";
const VERSION: u32 = 1;

pub fn write_checkpoint<T: Scalar, W: Write>(model: &TabularModel<T>, mut w: W) -> Result<()> {
    let spec = model.spec();
    let (ns, na) = (spec.num_states, spec.num_actions);
    let parts = model.raw_parts();
    writeln!(w, "{CHECKPOINT_MAGIC} {VERSION}")?;
    writeln!(w, "states {ns}")?;
    writeln!(w, "actions {na}")?;
    writeln!(w, "gamma {}", spec.gamma)?;
    writeln!(w, "r_max {}", spec.r_max)?;
    write_rows(&mut w, "visits", parts.visits, na)?;
    write_rows(&mut w, "reward_sums", parts.reward_sums, na)?;
    write_rows(&mut w, "r_hat", parts.r_hat, na)?;
    write_rows(&mut w, "q", parts.q, na)?;
    write_rows(&mut w, "v", parts.v, ns.max(1))?;

    let n: usize = parts.transitions.iter().map(Vec::len).sum();
    writeln!(w, "transitions {n}")?;
    for (i, row) in parts.transitions.iter().enumerate() {
        for &(s2, c) in row {
            writeln!(w, "{} {} {s2} {c}", i / na, i % na)?;
        }
    }
    let n: usize = parts.p_hat.iter().map(Vec::len).sum();
    writeln!(w, "p_hat {n}")?;
    for (i, row) in parts.p_hat.iter().enumerate() {
        for &(s2, p) in row {
            writeln!(w, "{} {} {s2} {p}", i / na, i % na)?;
        }
    }
    writeln!(w, "end")?;
    Ok(())
}

fn write_rows<W: Write, V: std::fmt::Display>(
    w: &mut W,
    tag: &str,
    values: &[V],
    width: usize,
) -> Result<()> {
    writeln!(w, "{tag}")?;
    for chunk in values.chunks(width) {
        let line: Vec<String> = chunk.iter().map(ToString::to_string).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next(&mut self) -> Result<String> {
        self.line += 1;
        match self.inner.next() {
            Some(l) => Ok(l?),
            None => Err(self.err("unexpected end of file")),
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Checkpoint {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn keyed(&mut self, key: &str) -> Result<String> {
        let l = self.next()?;
        let mut it = l.splitn(2, ' ');
        if it.next() != Some(key) {
            return Err(self.err(format!("expected `{key}`")));
        }
        Ok(it.next().unwrap_or("").trim().to_string())
    }

    fn parse<V: std::str::FromStr>(&self, tok: &str) -> Result<V> {
        tok.parse()
            .map_err(|_| self.err(format!("cannot parse `{tok}`")))
    }

    fn rows<V: std::str::FromStr>(
        &mut self,
        tag: &str,
        n_rows: usize,
        width: usize,
    ) -> Result<Vec<V>> {
        self.keyed(tag)?;
        let mut out = Vec::with_capacity(n_rows * width);
        for _ in 0..n_rows {
            let l = self.next()?;
            let before = out.len();
            for tok in l.split_whitespace() {
                out.push(self.parse(tok)?);
            }
            if out.len() - before != width {
                return Err(self.err(format!("`{tag}` row must have {width} entries")));
            }
        }
        Ok(out)
    }

    fn triplets<V: std::str::FromStr>(
        &mut self,
        tag: &str,
        ns: usize,
        na: usize,
    ) -> Result<Vec<Vec<(usize, V)>>> {
        let n: usize = {
            let v = self.keyed(tag)?;
            self.parse(&v)?
        };
        let mut rows: Vec<Vec<(usize, V)>> = (0..ns * na).map(|_| Vec::new()).collect();
        for _ in 0..n {
            let l = self.next()?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 4 {
                return Err(self.err("expected `s a s' value`"));
            }
            let s: usize = self.parse(toks[0])?;
            let a: usize = self.parse(toks[1])?;
            let s2: usize = self.parse(toks[2])?;
            if s >= ns || a >= na || s2 >= ns {
                return Err(self.err("index out of range"));
            }
            let row = &mut rows[s * na + a];
            if row.last().is_some_and(|&(k, _)| k >= s2) {
                return Err(self.err("successors must be strictly ascending"));
            }
            row.push((s2, self.parse(toks[3])?));
        }
        Ok(rows)
    }
}

pub fn read_checkpoint<T: Scalar, R: BufRead>(r: R) -> Result<TabularModel<T>> {
    let mut lines = Lines {
        inner: r.lines(),
        line: 0,
    };
    let version: u32 = {
        let v = lines.keyed(CHECKPOINT_MAGIC)?;
        lines.parse(&v)?
    };
    if version != VERSION {
        return Err(lines.err(format!("unsupported version {version}")));
    }
    let ns: usize = {
        let v = lines.keyed("states")?;
        lines.parse(&v)?
    };
    let na: usize = {
        let v = lines.keyed("actions")?;
        lines.parse(&v)?
    };
    let gamma: T = {
        let v = lines.keyed("gamma")?;
        lines.parse(&v)?
    };
    let r_max: T = {
        let v = lines.keyed("r_max")?;
        lines.parse(&v)?
    };
    let spec = MdpSpec::new(ns, na, gamma, r_max)?;
    let visits = lines.rows("visits", ns, na)?;
    let reward_sums = lines.rows("reward_sums", ns, na)?;
    let r_hat = lines.rows("r_hat", ns, na)?;
    let q = lines.rows("q", ns, na)?;
    let v = lines.rows("v", 1, ns)?;
    let transitions: Vec<Vec<(usize, u64)>> = lines.triplets("transitions", ns, na)?;
    let p_hat = lines.triplets("p_hat", ns, na)?;
    if lines.next()?.trim() != "end" {
        return Err(lines.err("expected `end`"));
    }
    for (i, row) in transitions.iter().enumerate() {
        let total: u64 = row.iter().map(|&(_, c)| c).sum();
        if total != visits[i] {
            return Err(lines.err(format!(
                "transition counts for pair {i} sum to {total}, visits say {}",
                visits[i]
            )));
        }
    }
    Ok(TabularModel::from_raw(
        spec,
        OwnedParts {
            visits,
            transitions,
            reward_sums,
            p_hat,
            r_hat,
            q,
            v,
        },
    ))
}
