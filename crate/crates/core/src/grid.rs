//! Evaluation grids: lambda-grids avoiding the positive real axis and disk
//! grids avoiding the cut (-inf,-1] u [1,inf).

use crate::error::Error;
use crate::numerics::C64;
use crate::Result;

/// True when lambda sits on (or within margin of) the closed positive ray.
pub fn on_positive_ray(lambda: C64, margin: f64) -> bool {
    lambda.im.abs() < margin && lambda.re > -margin
}

/// Default lambda-grid: n points split over two arcs |lambda| in {0.5, 2}
/// with arg in [0.2, 2pi - 0.2], nudged off a band around +-pi/2 so that the
/// sector-rotation branches stay unambiguous.
pub fn default_lambda_grid(n: usize) -> Vec<C64> {
    let half = n.div_ceil(2);
    let mut grid = Vec::with_capacity(n);
    for (radius, count) in [(0.5, half), (2.0, n - half)] {
        for i in 0..count {
            let span = 2.0 * std::f64::consts::PI - 0.4;
            let mut arg = 0.2 + span * (i as f64 + 0.5) / count as f64;
            for branch in [std::f64::consts::FRAC_PI_2, 1.5 * std::f64::consts::PI] {
                if (arg - branch).abs() < 1e-3 {
                    arg = branch + 2e-3;
                }
            }
            grid.push(C64::from_polar(radius, arg));
        }
    }
    grid
}

/// Disk grid for membership tests: points on circles of radius < 1 in both
/// half-planes plus a few real points, all at distance >= 0.05 from the cut.
pub fn disk_grid(n: usize) -> Vec<C64> {
    let mut grid = Vec::with_capacity(n);
    let per_ring = (n.saturating_sub(3)).div_ceil(2).max(1);
    for sign in [1.0f64, -1.0] {
        for i in 0..per_ring {
            let th = 0.15 + (std::f64::consts::PI - 0.3) * (i as f64 + 0.5) / per_ring as f64;
            grid.push(C64::from_polar(0.8, sign * th));
        }
    }
    grid.push(C64::new(0.0, 0.0));
    grid.push(C64::new(0.5, 0.0));
    grid.push(C64::new(-0.5, 0.0));
    grid.truncate(n.max(3));
    grid
}

/// Parses a grid spec: "default", "arcs:<n>", or a semicolon-separated list
/// of "re,im" pairs.
pub fn parse_grid(spec: &str) -> Result<Vec<C64>> {
    if spec == "default" {
        return Ok(default_lambda_grid(24));
    }
    if let Some(n) = spec.strip_prefix("arcs:") {
        let n: usize = n
            .parse()
            .map_err(|_| Error::Parse(format!("bad arc count in grid spec '{spec}'")))?;
        if n == 0 {
            return Err(Error::Parse("grid must have at least one point".into()));
        }
        return Ok(default_lambda_grid(n));
    }
    let mut grid = Vec::new();
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (re, im) = part
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected 're,im' in grid spec, got '{part}'")))?;
        let re: f64 = re
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad real part '{re}'")))?;
        let im: f64 = im
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad imaginary part '{im}'")))?;
        let lambda = C64::new(re, im);
        if on_positive_ray(lambda, 1e-3) {
            return Err(Error::Parse(format!(
                "grid point {lambda} is within 1e-3 of the positive real axis"
            )));
        }
        grid.push(lambda);
    }
    if grid.is_empty() {
        return Err(Error::Parse("empty grid".into()));
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_avoids_positive_ray() {
        let g = default_lambda_grid(24);
        assert_eq!(g.len(), 24);
        for z in &g {
            assert!(!on_positive_ray(*z, 1e-3), "{z}");
            assert!((z.norm() - 0.5).abs() < 1e-12 || (z.norm() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn disk_grid_avoids_cut() {
        for z in disk_grid(30) {
            assert!(z.norm() < 1.0);
            if z.im.abs() < 0.05 {
                assert!(z.re.abs() < 0.95);
            }
        }
    }

    #[test]
    fn parse_grid_variants() {
        assert_eq!(parse_grid("default").unwrap().len(), 24);
        assert_eq!(parse_grid("arcs:10").unwrap().len(), 10);
        let pts = parse_grid("-1,0; 0.5,0.5").unwrap();
        assert_eq!(pts.len(), 2);
        assert!(parse_grid("1,0").is_err());
        assert!(parse_grid("nonsense").is_err());
    }
}
