//! JSON wire format: `{"kind", "dims", "data"}` where `data` holds the
//! entries row-major as interleaved `re, im` pairs. Values round-trip
//! bit-exactly.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{c, CMatrix, CVector, DensityOperator, Operator, StateVector};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire {
    kind: String,
    dims: Vec<usize>,
    data: Vec<f64>,
}

fn matrix_data(m: &CMatrix) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)].re);
            out.push(m[(i, j)].im);
        }
    }
    out
}

fn matrix_from(dims: &[usize], data: &[f64]) -> Result<CMatrix, String> {
    let n: usize = dims.iter().product();
    if data.len() != 2 * n * n {
        return Err(format!("expected {} numbers for a {n}x{n} matrix, got {}", 2 * n * n, data.len()));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        let k = 2 * (i * n + j);
        c(data[k], data[k + 1])
    }))
}

fn expect_kind(w: &Wire, kind: &str) -> Result<(), String> {
    if w.kind != kind {
        return Err(format!("expected kind `{kind}`, found `{}`", w.kind));
    }
    Ok(())
}

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Wire { kind: "operator".into(), dims: self.dims.clone(), data: matrix_data(&self.mat) }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = Wire::deserialize(d)?;
        expect_kind(&w, "operator").map_err(D::Error::custom)?;
        let mat = matrix_from(&w.dims, &w.data).map_err(D::Error::custom)?;
        Operator::new(w.dims, mat).map_err(D::Error::custom)
    }
}

impl Serialize for DensityOperator {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Wire { kind: "density".into(), dims: self.dims.clone(), data: matrix_data(&self.mat) }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = Wire::deserialize(d)?;
        expect_kind(&w, "density").map_err(D::Error::custom)?;
        let mat = matrix_from(&w.dims, &w.data).map_err(D::Error::custom)?;
        DensityOperator::new(w.dims, mat).map_err(D::Error::custom)
    }
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let data = self.amps.iter().flat_map(|z| [z.re, z.im]).collect();
        Wire { kind: "state".into(), dims: self.dims.clone(), data }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = Wire::deserialize(d)?;
        expect_kind(&w, "state").map_err(D::Error::custom)?;
        if w.data.len() % 2 != 0 {
            return Err(D::Error::custom("odd number of entries in interleaved data"));
        }
        let amps = CVector::from_iterator(
            w.data.len() / 2,
            w.data.chunks_exact(2).map(|p| c(p[0], p[1])),
        );
        StateVector::new(w.dims, amps).map_err(D::Error::custom)
    }
}
