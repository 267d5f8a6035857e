//! Scale grids `start:stop[:step]` and window lists.

use coarsekit::scalar::parse_scalar;
use coarsekit::Scalar;

use crate::error::{CliError, Result};

fn scalar<T: Scalar>(text: &str) -> Result<T> {
    parse_scalar(text.trim()).ok_or_else(|| CliError::Usage(format!("cannot read scale `{text}`")))
}

/// A single value, or `start:stop[:step]` (inclusive, default step 1).
pub fn parse_grid<T: Scalar>(text: &str) -> Result<Vec<T>> {
    let parts: Vec<&str> = text.split(':').collect();
    let (start, stop, step) = match parts.as_slice() {
        [one] => {
            let v = scalar(one)?;
            (v, v, T::one())
        }
        [a, b] => (scalar(a)?, scalar(b)?, T::one()),
        [a, b, c] => (scalar(a)?, scalar(b)?, scalar(c)?),
        _ => return Err(CliError::Usage(format!("grid `{text}` is not start:stop[:step]"))),
    };
    if step <= T::zero() {
        return Err(CliError::Usage(format!("grid `{text}` needs a positive step")));
    }
    if start < T::zero() {
        return Err(CliError::Usage(format!("grid `{text}` has a negative scale")));
    }
    if stop < start {
        return Err(CliError::Usage(format!("grid `{text}` is not ascending")));
    }
    let mut out = Vec::new();
    let mut k = 0u64;
    loop {
        let v = start + step * T::from_count(k);
        if v > stop {
            break;
        }
        out.push(v);
        k += 1;
        if out.len() > 1_000_000 {
            return Err(CliError::Usage(format!("grid `{text}` is too long")));
        }
    }
    Ok(out)
}

pub fn parse_scale<T: Scalar>(text: &str) -> Result<T> {
    let v: T = scalar(text)?;
    if v < T::zero() {
        return Err(CliError::Usage(format!("scale `{text}` is negative")));
    }
    Ok(v)
}

/// Comma-separated strictly ascending window sizes.
pub fn parse_windows(text: &str) -> Result<Vec<u64>> {
    let windows = text
        .split(',')
        .map(|w| {
            w.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Usage(format!("cannot read window `{w}`")))
        })
        .collect::<Result<Vec<u64>>>()?;
    if windows.is_empty() || windows.windows(2).any(|p| p[0] >= p[1]) {
        return Err(CliError::Usage(format!("windows `{text}` must be strictly ascending")));
    }
    Ok(windows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use coarsekit::Rational64;

    #[test]
    fn grids() {
        assert_eq!(parse_grid::<i64>("0:4").unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(parse_grid::<i64>("1:7:3").unwrap(), vec![1, 4, 7]);
        assert_eq!(parse_grid::<i64>("5").unwrap(), vec![5]);
        let half = parse_grid::<Rational64>("0:1:1/2").unwrap();
        assert_eq!(half.len(), 3);
        assert!(parse_grid::<i64>("4:0").is_err());
        assert!(parse_grid::<i64>("0:4:0").is_err());
        assert!(parse_grid::<i64>("a:b").is_err());
    }

    #[test]
    fn windows() {
        assert_eq!(parse_windows("16,32,64").unwrap(), vec![16, 32, 64]);
        assert!(parse_windows("32,16").is_err());
        assert!(parse_windows("").is_err());
    }
}
