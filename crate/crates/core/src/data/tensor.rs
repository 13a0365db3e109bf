//! Small dense 3-tensors used by the initial-data layer.

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];
/// `d[l][i][j] = ∂_l T_ij`.
pub type DMat3 = [Mat3; 3];
/// `d[k][l][i][j] = ∂_k ∂_l T_ij`.
pub type DDMat3 = [[Mat3; 3]; 3];
/// `c[i][j][k] = Γ^i_jk`.
pub type Christoffel = [[[f64; 3]; 3]; 3];

pub const ZERO3: Mat3 = [[0.0; 3]; 3];
pub const IDENTITY3: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

pub fn scale(m: &Mat3, s: f64) -> Mat3 {
    let mut out = *m;
    out.iter_mut().flatten().for_each(|x| *x *= s);
    out
}

pub fn det(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn inverse(m: &Mat3) -> Option<Mat3> {
    let d = det(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut inv = ZERO3;
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = ((j + 1) % 3, (j + 2) % 3);
            let (c, e) = ((i + 1) % 3, (i + 2) % 3);
            inv[i][j] = (m[a][c] * m[b][e] - m[a][e] * m[b][c]) / d;
        }
    }
    Some(inv)
}

/// Symmetric positive definite test via leading principal minors.
pub fn is_positive_definite(m: &Mat3) -> bool {
    m[0][0] > 0.0 && m[0][0] * m[1][1] - m[0][1] * m[1][0] > 0.0 && det(m) > 0.0
}

pub fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
}

/// `m(a, b) = m_ij a^i b^j`.
pub fn bilinear(m: &Mat3, a: &Vec3, b: &Vec3) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += m[i][j] * a[i] * b[j];
        }
    }
    s
}

/// `g^{ij} m_ij`.
pub fn trace(ginv: &Mat3, m: &Mat3) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += ginv[i][j] * m[i][j];
        }
    }
    s
}

/// `g^{ik} g^{jl} a_ij b_kl`.
pub fn contract2(ginv: &Mat3, a: &Mat3, b: &Mat3) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    s += ginv[i][k] * ginv[j][l] * a[i][j] * b[k][l];
                }
            }
        }
    }
    s
}

/// `Γ_mjl = ½(∂_j g_ml + ∂_l g_mj − ∂_m g_jl)` (first kind).
fn christoffel_first(dg: &DMat3) -> Christoffel {
    let mut c = [[[0.0; 3]; 3]; 3];
    for m in 0..3 {
        for j in 0..3 {
            for l in 0..3 {
                c[m][j][l] = 0.5 * (dg[j][m][l] + dg[l][m][j] - dg[m][j][l]);
            }
        }
    }
    c
}

pub fn christoffel(ginv: &Mat3, dg: &DMat3) -> Christoffel {
    let first = christoffel_first(dg);
    let mut c = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for l in 0..3 {
                c[i][j][l] = (0..3).map(|m| ginv[i][m] * first[m][j][l]).sum();
            }
        }
    }
    c
}

/// `∂_k Γ^i_jl`, indexed `[k][i][j][l]`.
fn christoffel_derivative(ginv: &Mat3, dg: &DMat3, ddg: &DDMat3) -> [Christoffel; 3] {
    let first = christoffel_first(dg);
    let mut out = [[[[0.0; 3]; 3]; 3]; 3];
    for k in 0..3 {
        // ∂_k g^{im} = −g^{ia} ∂_k g_ab g^{bm}
        let mut dginv = ZERO3;
        for i in 0..3 {
            for m in 0..3 {
                let mut s = 0.0;
                for a in 0..3 {
                    for b in 0..3 {
                        s -= ginv[i][a] * dg[k][a][b] * ginv[b][m];
                    }
                }
                dginv[i][m] = s;
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    let mut s = 0.0;
                    for m in 0..3 {
                        let dfirst =
                            0.5 * (ddg[k][j][m][l] + ddg[k][l][m][j] - ddg[k][m][j][l]);
                        s += dginv[i][m] * first[m][j][l] + ginv[i][m] * dfirst;
                    }
                    out[k][i][j][l] = s;
                }
            }
        }
    }
    out
}

/// Ricci tensor `R_ij`.
pub fn ricci(ginv: &Mat3, dg: &DMat3, ddg: &DDMat3) -> Mat3 {
    let c = christoffel(ginv, dg);
    let dc = christoffel_derivative(ginv, dg, ddg);
    let mut r = ZERO3;
    for i in 0..3 {
        for j in 0..3 {
            let mut s = 0.0;
            for k in 0..3 {
                s += dc[k][k][i][j] - dc[j][k][i][k];
                for l in 0..3 {
                    s += c[k][k][l] * c[l][i][j] - c[k][j][l] * c[l][i][k];
                }
            }
            r[i][j] = s;
        }
    }
    r
}

pub fn scalar_curvature(ginv: &Mat3, dg: &DMat3, ddg: &DDMat3) -> f64 {
    trace(ginv, &ricci(ginv, dg, ddg))
}
