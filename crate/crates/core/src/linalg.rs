//! Small dense linear algebra over `F_p`.

/// Modular inverse for a prime modulus.
pub fn inv_mod(x: u32, p: u32) -> u32 {
    debug_assert!(!x.is_multiple_of(p));
    let mut result = 1u64;
    let mut base = u64::from(x % p);
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % u64::from(p);
        }
        base = base * base % u64::from(p);
        e >>= 1;
    }
    result as u32
}

#[derive(Clone, Debug)]
struct Row {
    vec: Vec<u8>,
    pivot: usize,
    // the row as a combination of the stored inputs
    coeffs: Vec<u8>,
}

/// A reduced row-echelon basis of a subspace of `F_p^dim`, remembering how
/// each row is built from the independent vectors that were inserted.
#[derive(Clone, Debug)]
pub struct Echelon {
    p: u32,
    dim: usize,
    rows: Vec<Row>,
    inputs: usize,
}

impl Echelon {
    pub fn new(p: u32, dim: usize) -> Self {
        Echelon {
            p,
            dim,
            rows: Vec::new(),
            inputs: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Reduces `v` against the basis. Returns the canonical residue and the
    /// coefficients `c` over stored inputs with `v = residue + sum c_i input_i`.
    pub fn reduce(&self, v: &[u8]) -> (Vec<u8>, Vec<u8>) {
        let p = self.p;
        let mut residue = v.to_vec();
        let mut coeffs = vec![0u8; self.inputs];
        for row in &self.rows {
            let c = u32::from(residue[row.pivot]);
            if c == 0 {
                continue;
            }
            for (r, &x) in residue.iter_mut().zip(&row.vec) {
                *r = ((u32::from(*r) + (p - c) * u32::from(x)) % p) as u8;
            }
            for (k, &x) in coeffs.iter_mut().zip(&row.coeffs) {
                *k = ((u32::from(*k) + c * u32::from(x)) % p) as u8;
            }
        }
        (residue, coeffs)
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        self.reduce(v).0.iter().all(|&x| x == 0)
    }

    /// Inserts `v`. On success returns the new input's index; if `v` is
    /// already in the span, returns the coefficients expressing it over the
    /// stored inputs.
    pub fn insert(&mut self, v: &[u8]) -> Result<usize, Vec<u8>> {
        let p = self.p;
        let (mut residue, coeffs) = self.reduce(v);
        let Some(pivot) = residue.iter().position(|&x| x != 0) else {
            return Err(coeffs);
        };
        let index = self.inputs;
        self.inputs += 1;
        for row in &mut self.rows {
            row.coeffs.push(0);
        }
        // residue = v - sum coeffs_i input_i
        let mut row_coeffs: Vec<u8> = coeffs
            .iter()
            .map(|&c| ((p - u32::from(c)) % p) as u8)
            .collect();
        row_coeffs.push(1);
        let scale = inv_mod(u32::from(residue[pivot]), p);
        for x in residue.iter_mut().chain(row_coeffs.iter_mut()) {
            *x = (u32::from(*x) * scale % p) as u8;
        }
        for row in &mut self.rows {
            let c = u32::from(row.vec[pivot]);
            if c == 0 {
                continue;
            }
            for (r, &x) in row.vec.iter_mut().zip(&residue) {
                *r = ((u32::from(*r) + (p - c) * u32::from(x)) % p) as u8;
            }
            for (r, &x) in row.coeffs.iter_mut().zip(&row_coeffs) {
                *r = ((u32::from(*r) + (p - c) * u32::from(x)) % p) as u8;
            }
        }
        let at = self.rows.partition_point(|r| r.pivot < pivot);
        self.rows.insert(
            at,
            Row {
                vec: residue,
                pivot,
                coeffs: row_coeffs,
            },
        );
        Ok(index)
    }
}

/// Rank of a list of vectors over `F_p`.
pub fn rank(p: u32, vectors: &[Vec<u8>]) -> usize {
    let dim = vectors.first().map_or(0, Vec::len);
    let mut e = Echelon::new(p, dim);
    for v in vectors {
        let _ = e.insert(v);
    }
    e.rank()
}
