//! Parsing of command-line values into library types.

use num_complex::Complex64;
use serde_json::Value;
use symtorus::siegel::{siegel_from_pairs, CVector};
use symtorus::{Error, IntMatrix, RealCoordinate, Result, SiegelPoint, SymplecticMatrix};

/// `T` as JSON rows of `[re, im]` pairs. A single row of two numbers,
/// `[[re, im]]`, is read as a 1x1 matrix.
pub fn siegel(text: &str) -> Result<SiegelPoint> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("T: {e}")))?;
    if let Ok(rows) = serde_json::from_value::<Vec<Vec<[f64; 2]>>>(value.clone()) {
        return siegel_from_pairs(&rows);
    }
    match serde_json::from_value::<Vec<Vec<f64>>>(value) {
        Ok(rows) if rows.len() == 1 && rows[0].len() == 2 => siegel_from_pairs(&[vec![[rows[0][0], rows[0][1]]]]),
        _ => Err(Error::Parse("T must be rows of [re, im] pairs".into())),
    }
}

fn floats(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',').map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{what}: {e}")))).collect()
}

/// `"re,im,re,im,..."` with `n` complex entries.
pub fn complex_vector(text: &str, n: usize) -> Result<CVector> {
    let v = floats(text, "z")?;
    if v.len() != 2 * n {
        return Err(Error::Dimension(format!("z needs {} numbers, got {}", 2 * n, v.len())));
    }
    Ok(CVector::from_iterator(n, v.chunks(2).map(|p| Complex64::new(p[0], p[1]))))
}

/// `"x1_1,...,x1_n,x2_1,...,x2_n"`.
pub fn real_coordinate(text: &str, n: usize) -> Result<RealCoordinate> {
    let v = floats(text, "x")?;
    if v.len() != 2 * n {
        return Err(Error::Dimension(format!("x needs {} numbers, got {}", 2 * n, v.len())));
    }
    RealCoordinate::from_stacked(&v)
}

/// Integer rows, e.g. `[[0,-1],[1,0]]`.
pub fn symplectic(text: &str) -> Result<SymplecticMatrix> {
    let rows: Vec<Vec<i64>> = serde_json::from_str(text).map_err(|e| Error::Parse(format!("g: {e}")))?;
    SymplecticMatrix::new(IntMatrix::from_rows(&rows)?)
}
