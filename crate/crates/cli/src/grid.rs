//! Parameter grids as given on the command line.

use std::str::FromStr;

/// Ascending, deduplicated grid values.
///
/// Accepted forms: a single value (`64`), a comma list (`64,128,256`), or an
/// octave range `lo..hi` that doubles from `lo` up to `hi` inclusive
/// (`256..16384`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid(Vec<usize>);

impl Grid {
    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn max(&self) -> usize {
        *self.0.last().expect("grids are nonempty")
    }
}

fn number(s: &str) -> Result<usize, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("{s:?} is not a nonnegative integer"))
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut values = if let Some((lo, hi)) = s.split_once("..") {
            let (lo, hi) = (number(lo)?, number(hi)?);
            if lo == 0 || lo > hi {
                return Err(format!("range {s:?} needs 0 < lo <= hi"));
            }
            std::iter::successors(Some(lo), |&x| x.checked_mul(2))
                .take_while(|&x| x <= hi)
                .collect()
        } else {
            s.split(',').map(number).collect::<Result<Vec<_>, _>>()?
        };
        values.sort_unstable();
        values.dedup();
        if values.is_empty() {
            return Err("empty grid".into());
        }
        Ok(Grid(values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!("64".parse::<Grid>().unwrap().values(), &[64]);
        assert_eq!("256,64,128,64".parse::<Grid>().unwrap().values(), &[64, 128, 256]);
        let g: Grid = "256..16384".parse().unwrap();
        assert_eq!(g.values(), &[256, 512, 1024, 2048, 4096, 8192, 16384]);
        assert_eq!("4..1000".parse::<Grid>().unwrap().max(), 512);
    }

    #[test]
    fn rejects() {
        for bad in ["", "x", "0..8", "9..8", "1,,2", "-3"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad:?}");
        }
    }
}
