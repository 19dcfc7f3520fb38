/// Published integer coefficients of the three-qubit closed forms.
///
/// Every series has the shape `(1/6) Σ A[n][k] uⁿ vᵏ` with `u = −4p/3` and
/// `v = −3q/2`; the power-of-two and power-of-three prefactors and the signs
/// are applied at evaluation time. The swap vectors omit their constant term,
/// which is 6 in this normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientTable {
    pub a_swap: [i64; 12],
    pub a_teleport: [[i64; 3]; 11],
    pub a_cluster: [[i64; 3]; 11],
    pub b_swap: [i64; 11],
    pub b_teleport: [[i64; 3]; 10],
    pub b_cluster: [[i64; 3]; 10],
}

/// Transposes rows indexed by `k` into `[n][k]`.
const fn columns<const N: usize>(rows: [[i64; N]; 3]) -> [[i64; 3]; N] {
    let mut out = [[0i64; 3]; N];
    let mut n = 0;
    while n < N {
        out[n] = [rows[0][n], rows[1][n], rows[2][n]];
        n += 1;
    }
    out
}

pub const PUBLISHED: CoefficientTable = CoefficientTable {
    a_swap: [32, 156, 460, 915, 1296, 1344, 1032, 585, 240, 68, 12, 1],
    a_teleport: columns([
        [6, 26, 102, 239, 371, 399, 301, 157, 54, 11, 1],
        [4, 36, 147, 359, 581, 651, 511, 277, 99, 21, 2],
        [1, 10, 45, 120, 210, 252, 210, 120, 45, 10, 1],
    ]),
    a_cluster: columns([
        [6, 26, 105, 260, 435, 510, 421, 240, 90, 20, 2],
        [4, 40, 180, 480, 840, 1008, 840, 480, 180, 40, 4],
        [2, 20, 90, 240, 420, 504, 420, 240, 90, 20, 2],
    ]),
    b_swap: [29, 127, 333, 582, 714, 630, 402, 183, 57, 11, 1],
    b_teleport: columns([
        [6, 23, 79, 160, 211, 188, 113, 44, 10, 1],
        [4, 32, 115, 244, 337, 314, 197, 80, 19, 2],
        [1, 9, 36, 84, 126, 126, 84, 36, 9, 1],
    ]),
    b_cluster: columns([
        [6, 23, 82, 178, 257, 253, 168, 72, 18, 2],
        [4, 36, 144, 336, 504, 504, 336, 144, 36, 4],
        [2, 18, 72, 168, 252, 252, 168, 72, 18, 2],
    ]),
};

impl CoefficientTable {
    pub fn published() -> &'static Self {
        &PUBLISHED
    }
}
