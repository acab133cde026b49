use std::str::FromStr;

use rand::{Rng, RngCore};

use super::{EnvStep, Environment};
use crate::error::{check_index, Error, Result};

pub const LEFT: usize = 0;
pub const DOWN: usize = 1;
pub const RIGHT: usize = 2;
pub const UP: usize = 3;

/// The standard 8x8 map with ten holes.
pub const STANDARD_8X8: &str = "\
SFFFFFFF
FFFFFFFF
FFFHFFFF
FFFFFHFF
FFFHFFFF
FHHFFFHF
FHFFHFHF
FFFHFFFG";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Start,
    Frozen,
    Hole,
    Goal,
}

impl Cell {
    fn is_terminal(self) -> bool {
        matches!(self, Cell::Hole | Cell::Goal)
    }
}

/// Grid world: reach `G` without falling into an `H`. With `slippery` the
/// agent moves in the intended direction or either perpendicular one, each
/// with probability 1/3.
#[derive(Debug, Clone)]
pub struct FrozenLake {
    cells: Vec<Cell>,
    rows: usize,
    cols: usize,
    start: usize,
    slippery: bool,
    current: usize,
    done: bool,
}

impl FromStr for FrozenLake {
    type Err = Error;

    /// Parses rows of `S`/`F`/`H`/`G`; the result is slippery.
    fn from_str(text: &str) -> Result<Self> {
        let mut cells = Vec::new();
        let mut cols = None;
        let mut rows = 0;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let row: Vec<Cell> = line
                .chars()
                .map(|c| match c {
                    'S' => Ok(Cell::Start),
                    'F' => Ok(Cell::Frozen),
                    'H' => Ok(Cell::Hole),
                    'G' => Ok(Cell::Goal),
                    other => Err(Error::Config(format!("unknown map cell `{other}`"))),
                })
                .collect::<Result<_>>()?;
            if *cols.get_or_insert(row.len()) != row.len() {
                return Err(Error::Config("map rows differ in length".into()));
            }
            cells.extend(row);
            rows += 1;
        }
        let starts: Vec<usize> = (0..cells.len())
            .filter(|&i| cells[i] == Cell::Start)
            .collect();
        if starts.len() != 1 {
            return Err(Error::Config(format!(
                "map needs exactly one start, found {}",
                starts.len()
            )));
        }
        Ok(Self {
            cells,
            rows,
            cols: cols.unwrap_or(0),
            start: starts[0],
            slippery: true,
            current: starts[0],
            done: false,
        })
    }
}

impl FrozenLake {
    pub fn standard(slippery: bool) -> Self {
        STANDARD_8X8
            .parse::<Self>()
            .expect("built-in map is valid")
            .with_slippery(slippery)
    }

    pub fn with_slippery(mut self, slippery: bool) -> Self {
        self.slippery = slippery;
        self
    }

    pub fn cell(&self, s: usize) -> Cell {
        self.cells[s]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn current(&self) -> usize {
        self.current
    }

    /// Places the agent on an arbitrary non-terminal cell.
    pub fn set_current(&mut self, s: usize) -> Result<()> {
        check_index("cell", s, self.cells.len())?;
        self.current = s;
        self.done = self.cells[s].is_terminal();
        Ok(())
    }

    /// Cell reached from `s` moving in `direction`; walls clamp.
    pub fn neighbor(&self, s: usize, direction: usize) -> usize {
        let (r, c) = (s / self.cols, s % self.cols);
        let (r, c) = match direction {
            LEFT => (r, c.saturating_sub(1)),
            DOWN => ((r + 1).min(self.rows - 1), c),
            RIGHT => (r, (c + 1).min(self.cols - 1)),
            UP => (r.saturating_sub(1), c),
            _ => unreachable!("direction checked by caller"),
        };
        r * self.cols + c
    }

    /// Exact next-state distribution, used to build ground-truth models.
    pub fn transition_probs(&self, s: usize, a: usize) -> Vec<(usize, f64)> {
        if !self.slippery {
            return vec![(self.neighbor(s, a), 1.0)];
        }
        [(a + 3) % 4, a, (a + 1) % 4]
            .iter()
            .map(|&d| (self.neighbor(s, d), 1.0 / 3.0))
            .collect()
    }
}

impl Environment for FrozenLake {
    fn num_states(&self) -> usize {
        self.cells.len()
    }

    fn num_actions(&self) -> usize {
        4
    }

    fn r_max(&self) -> f64 {
        1.0
    }

    fn reset(&mut self, _rng: &mut dyn RngCore) -> usize {
        self.current = self.start;
        self.done = false;
        self.current
    }

    fn step(&mut self, action: usize, rng: &mut dyn RngCore) -> Result<EnvStep> {
        if self.done {
            return Err(Error::StepAfterDone);
        }
        check_index("action", action, 4)?;
        let direction = if self.slippery {
            [(action + 3) % 4, action, (action + 1) % 4][rng.random_range(0..3)]
        } else {
            action
        };
        self.current = self.neighbor(self.current, direction);
        let cell = self.cells[self.current];
        self.done = cell.is_terminal();
        Ok(EnvStep {
            next_state: self.current,
            reward: if cell == Cell::Goal { 1.0 } else { 0.0 },
            done: self.done,
        })
    }
}
