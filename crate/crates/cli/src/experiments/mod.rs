//! One function per subcommand; each returns its checks and tables.

pub mod bath;
pub mod chain;
pub mod dynamics;
pub mod fock;

use fockbath::{Error, Result};

/// Accepts plain integers and integral scientific notation such as `1e6`.
pub fn parse_count(s: &str) -> std::result::Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("'{s}' is not a count"))?;
    if !(x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x <= 9.007_199_254_740_992e15) {
        return Err(format!("'{s}' is not a non-negative integer"));
    }
    Ok(x as usize)
}

/// Stochastic runs must name their seed.
pub fn require_seed(seed: Option<u64>, what: &str) -> Result<u64> {
    seed.ok_or_else(|| Error::Parameter(format!("{what} is stochastic: --seed is required")))
}

/// `n` evenly spaced times on `[0, t_max]`.
pub fn time_grid(n: usize, t_max: f64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("42"), Ok(42));
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
        assert!(parse_count("abc").is_err());
    }

    #[test]
    fn grid() {
        assert_eq!(time_grid(3, 2.0), vec![0.0, 1.0, 2.0]);
        assert_eq!(time_grid(1, 2.0), vec![0.0]);
    }
}
