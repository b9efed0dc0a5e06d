/*
 * Copyright 2026 The hestonpde Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HESTONPDE_OPERATOR_HPP
#define HESTONPDE_OPERATOR_HPP

#include <Eigen/Dense>

#include "hestonpde/basis.hpp"
#include "hestonpde/params.hpp"
#include "hestonpde/quadrature.hpp"

namespace heston {

/// One-dimensional quadrature blocks.  Convention: B[a, b] integrates the
/// a-indexed (trial) function against the b-indexed (test) function, so a
/// bilinear-form matrix entry A[test j, trial k] contracts blk[k_m, j_m] in x
/// with blk[k_n, j_n] in xi.
struct Blocks1D {
    // x-direction, weight e^{-gamma|x|}
    Eigen::MatrixXd x00;   ///< h_a h_b
    Eigen::MatrixXd x10;   ///< h_a' h_b
    Eigen::MatrixXd x11;   ///< h_a' h_b'
    Eigen::MatrixXd xs00;  ///< sign(x) h_a h_b
    Eigen::MatrixXd xs10;  ///< sign(x) h_a' h_b
    Eigen::MatrixXd x20;   ///< h_a'' h_b
    // xi-direction, weight xi^{beta-1} e^{-mu xi}
    Eigen::MatrixXd q00;   ///< l_a l_b
    Eigen::MatrixXd q00x;  ///< l_a l_b xi
    Eigen::MatrixXd q10;   ///< l_a' l_b
    Eigen::MatrixXd q10x;  ///< l_a' l_b xi
    Eigen::MatrixXd q11x;  ///< l_a' l_b' xi
    Eigen::MatrixXd q20x;  ///< l_a'' l_b xi
};

struct ShiftParams {
    double y = 0.0;             ///< imaginary x-shift; never enters assembly
    double omega = 0.0;         ///< xi-ray slope
    Complex omega_star{0.0, 0.0};

    Complex lambda() const { return Complex(0.0, omega) + omega_star; }
    /// Throws when |omega| or |omega_star| exceeds the admissible range.
    void check() const;
};

/// Mass, stiffness and form matrices over the tensor basis, plus the cached
/// 1-D blocks every shifted/path assembly reuses.  Immutable once assembled.
struct OperatorMatrices {
    TensorBasis basis{0, 0};
    TransformedParams params;
    WeightParams weight;
    Blocks1D blk;
    Eigen::MatrixXd M; ///< H-mass (e_j, e_k)_H, symmetric positive definite
    Eigen::MatrixXd S; ///< V-stiffness: gradient part of the V-product
    Eigen::MatrixXd A; ///< form matrix, A[j,k] = a(e_k, e_j)

    /// Complex form matrix of the shifted operator; equals A at zero shift.
    Eigen::MatrixXcd shifted(const ShiftParams& s) const;
};

OperatorMatrices assemble(const TensorBasis& basis, const QuadratureGrid& grid,
                          const TransformedParams& t, const WeightParams& w);

/// Independent direct-quadrature evaluation of the sesquilinear form on a
/// single basis pair (separate code path used by tests as an oracle).
double form_entry_direct(const TensorBasis& basis, int m_trial, int n_trial,
                         int m_test, int n_test, const QuadratureGrid& grid,
                         const TransformedParams& t, const WeightParams& w);

/// Spectrally truncated H-orthonormal frame.  The tensor mass matrix
/// factorizes over the two directions, so its eigenbasis is assembled from
/// two small symmetric eigenproblems; directions whose product eigenvalue
/// falls below eps * lambda_max carry no resolvable H-mass in double
/// precision and are dropped.  All solves and certifications run here.
class WhitenedSystem {
public:
    WhitenedSystem(const OperatorMatrices& mats, double eps = 1e-13);

    int kept() const { return static_cast<int>(kept_.size()); }
    int full_size() const { return static_cast<int>(map_.rows()); }
    const OperatorMatrices& mats() const { return *mats_; }

    /// chat = D U^T c restricted to kept modes (H-orthogonal projection).
    Eigen::VectorXcd reduce(const Eigen::VectorXcd& c) const;
    /// c = map * chat; reduce(expand(chat)) == chat.
    Eigen::VectorXcd expand(const Eigen::VectorXcd& chat) const;

    /// Whitened form matrix Ahat (H-mass becomes the identity).
    const Eigen::MatrixXd& Ahat() const { return ahat_; }
    /// Whitened V-stiffness Shat; ||u||_V^2 = chat^H (Shat + I) chat.
    const Eigen::MatrixXd& Shat() const { return shat_; }

    /// Whitened matrix of a scalar combination sum_k coeff_k Xblk_k (x) Qblk_k.
    Eigen::MatrixXcd combine(const std::vector<std::tuple<Complex, const Eigen::MatrixXd*,
                                                          const Eigen::MatrixXd*>>& terms) const;
    /// Same in the real case.
    Eigen::MatrixXd combine_real(const std::vector<std::tuple<double, const Eigen::MatrixXd*,
                                                              const Eigen::MatrixXd*>>& terms) const;

    /// Whitened shifted form matrix.
    Eigen::MatrixXcd shifted_hat(const ShiftParams& s) const;

    double h_norm(const Eigen::VectorXcd& chat) const { return chat.norm(); }
    double v_norm_sq(const Eigen::VectorXcd& chat) const;

private:
    const OperatorMatrices* mats_;
    Eigen::MatrixXd x01_;                // transpose of blk.x10, kept alive for caching
    Eigen::MatrixXd ux_, uq_;            // factor eigenvectors
    Eigen::VectorXd lx_, lq_;            // factor eigenvalues
    std::vector<std::pair<int, int>> kept_;
    Eigen::VectorXd dkept_;              // sqrt(lambda_x * lambda_q) on kept
    Eigen::MatrixXd map_;                // full x kept: c = map * chat
    Eigen::MatrixXd ahat_, shat_;
    // cached transformed 1-D blocks (U^T B U), keyed by block pointer
    Eigen::MatrixXd tx_[12], tq_[12];
    const Eigen::MatrixXd* srcx_[12];
    const Eigen::MatrixXd* srcq_[12];
    const Eigen::MatrixXd& tx(const Eigen::MatrixXd* b) const;
    const Eigen::MatrixXd& tq(const Eigen::MatrixXd* b) const;
};

struct CertReport {
    std::string name;
    int trials = 0;
    double worst_slack_rel = 0.0; ///< Garding: min slack / V-energy
    double max_ratio = 0.0;       ///< boundedness: max |a(u,w)|/(|u|_V |w|_V)
    double bound = 0.0;           ///< explicit constant used
    double empirical_constant = 0.0; ///< minimal c2'' observed (shifted form)
    bool pass = false;

    nlohmann::json to_json() const;
};

/// Garding inequality on random unit-H-norm states:
/// 2 Re a(u,u) >= sigma(1-|rho|) ||u||_V^2 - c2' ||u||_H^2 (real form), and
/// the sigma/2 variant with c2'' = c2' for each omega in omegas.
CertReport certify_garding(const OperatorMatrices& mats,
                           const CoercivityConstants& cc, int trials,
                           const std::vector<double>& omegas = {},
                           unsigned seed = 20260809);

/// Boundedness: sampled ratio |a(u,w)| / (||u||_V ||w||_V) against the
/// explicit constant (sigma/2) sqrt(6) + M1 * max{1, Sobolev, Hardy} chain.
CertReport certify_bounded(const OperatorMatrices& mats,
                           const CoercivityConstants& cc, int trials,
                           unsigned seed = 20260809);

/// Boundary-decay diagnostic: largest boundary integrand of the bilinear-form
/// integration by parts, evaluated at the truncation edges for e_{m_max,n_max}.
double boundary_leakage(const TensorBasis& basis, const QuadratureGrid& grid,
                        const WeightParams& w);

/// Dense matrix export in (row, col, re, im) triplet CSV form.
void save_matrix_csv(const Eigen::MatrixXcd& m, const std::string& path);
void save_matrix_csv(const Eigen::MatrixXd& m, const std::string& path);

} // namespace heston

#endif // HESTONPDE_OPERATOR_HPP
