// SPDX-License-Identifier: Apache-2.0
//
// jcaswave: waveform optimization for broadband joint communication and
// radar sensing (JCAS) systems.
// Copyright (C) 2026 The jcaswave authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "jcaswave/jcas_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jcaswave {

namespace {

constexpr double kComplementTol = 1e-10;  // slack when checking the inactive constraint
constexpr double kEpsFloor = 1e-13;       // smallest step the halving fallback reaches

}  // namespace

void JcasParams::validate() const {
    if (!(rho > 0.0)) throw std::invalid_argument("JcasParams: rho must be positive");
    if (!(xi > 0.0)) throw std::invalid_argument("JcasParams: xi must be positive");
    if (!(epsilon > 0.0)) throw std::invalid_argument("JcasParams: epsilon must be positive");
    if (max_iters < 1) throw std::invalid_argument("JcasParams: max_iters must be >= 1");
    if (!(stall_tol >= 0.0)) throw std::invalid_argument("JcasParams: stall_tol must be >= 0");
}

Eigen::VectorXd realify_vector(const Eigen::VectorXcd& p) {
    Eigen::VectorXd out(2 * p.size());
    out.head(p.size()) = p.real();
    out.tail(p.size()) = p.imag();
    return out;
}

Eigen::VectorXcd unrealify_vector(const Eigen::VectorXd& p_bar) {
    const Eigen::Index n = p_bar.size() / 2;
    Eigen::VectorXcd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = {p_bar(i), p_bar(n + i)};
    return out;
}

Eigen::MatrixXd realify_matrix(const Eigen::MatrixXcd& r) {
    const Eigen::Index n = r.rows();
    Eigen::MatrixXd out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = r.real();
    out.topRightCorner(n, n) = -r.imag();
    out.bottomLeftCorner(n, n) = r.imag();
    out.bottomRightCorner(n, n) = r.real();
    return out;
}

RealifiedProblem realify(const Eigen::VectorXcd& p, const Eigen::MatrixXcd& r) {
    if (p.size() != r.rows() || r.rows() != r.cols())
        throw std::invalid_argument("realify: shape mismatch");
    RealifiedProblem out;
    out.p_bar = realify_vector(p);
    out.r_bar = realify_matrix(r);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
    out.v_r = realify_vector(phase_fixed(es.eigenvectors().col(0)));
    out.r_r = es.eigenvalues()(0);
    return out;
}

double constraint_psi(const Eigen::MatrixXcd& p) { return p.squaredNorm(); }

double constraint_psi_prime(const Eigen::MatrixXcd& p, const Eigen::MatrixXcd& mi_star) {
    if (p.rows() != mi_star.rows() || p.cols() != mi_star.cols())
        throw std::invalid_argument("constraint_psi_prime: shape mismatch");
    return (p - mi_star).squaredNorm();
}

double constraint_psi_dprime(const Eigen::MatrixXcd& p, const Eigen::MatrixXcd& q_star,
                             PsiDprimeMode mode) {
    if (q_star.rows() != p.rows() || q_star.cols() != p.rows())
        throw std::invalid_argument("constraint_psi_dprime: q_star must be N x N");
    const Eigen::MatrixXcd delta = p * p.adjoint() - q_star;
    const Eigen::MatrixXd m = delta.real() + delta.imag();
    return mode == PsiDprimeMode::determinant ? std::abs(m.determinant()) : m.norm();
}

std::uint64_t IterationTrace::total_ops() const {
    std::uint64_t s = 0;
    for (const auto& t : per_k) s += t.ops;
    return s;
}

int IterationTrace::total_sweeps() const {
    int s = 0;
    for (const auto& t : per_k) s += t.sweeps;
    return s;
}

std::string IterationTrace::termination_summary() const {
    std::string worst = "closed_form";
    for (const auto& t : per_k) {
        if (t.termination == "max_iters") return "max_iters";
        if (t.termination != "closed_form") worst = t.termination;
    }
    return worst;
}

namespace {

// Orthonormal real basis adapted to one column's quadratic form: columns
// 2i and 2i+1 are the realifications of v_i and j v_i, both with eigenvalue
// lambda_i, so the objective is a diagonal quadratic in these coordinates
// and every per-sweep update costs O(N).
struct ColumnBasis {
    Eigen::MatrixXd basis;   // 2N x 2N
    Eigen::VectorXd eig;     // 2N, interleaved duplicates
    Eigen::VectorXcd v_neg;  // complex eigenvector of the smallest eigenvalue
    double lambda_neg = 0.0;
};

ColumnBasis column_basis(const Eigen::MatrixXcd& r) {
    const int n = int(r.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
    ColumnBasis out;
    out.basis.resize(2 * n, 2 * n);
    out.eig.resize(2 * n);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXcd v = phase_fixed(es.eigenvectors().col(i));
        out.basis.col(2 * i).head(n) = v.real();
        out.basis.col(2 * i).tail(n) = v.imag();
        out.basis.col(2 * i + 1).head(n) = -v.imag();
        out.basis.col(2 * i + 1).tail(n) = v.real();
        out.eig(2 * i) = es.eigenvalues()(i);
        out.eig(2 * i + 1) = es.eigenvalues()(i);
    }
    out.v_neg = phase_fixed(es.eigenvectors().col(0));
    out.lambda_neg = es.eigenvalues()(0);
    return out;
}

struct KProblem {
    ConstraintKind kind = ConstraintKind::mi;
    int n = 0;
    int u_count = 0;
    double rho = 0.0;
    double xi = 0.0;
    PsiDprimeMode mode = PsiDprimeMode::determinant;
    std::vector<ColumnBasis> cols;
    Eigen::MatrixXcd center;                 // N x U: MI precoder or covariance factor
    std::vector<Eigen::VectorXd> z_center;   // per column, in that column's basis
    Eigen::MatrixXcd q_target;               // N x N optimal covariance (crb kind)
};

KProblem build_kproblem(ConstraintKind kind, const std::vector<Eigen::MatrixXcd>& ru_k,
                        const Eigen::MatrixXcd& center, const Eigen::MatrixXcd& q_target,
                        const JcasParams& params, int k_index) {
    KProblem prob;
    prob.kind = kind;
    prob.n = int(ru_k.front().rows());
    prob.u_count = int(ru_k.size());
    prob.rho = params.rho;
    prob.xi = params.xi;
    prob.mode = params.psi2_mode;
    prob.center = center;
    prob.q_target = q_target;
    for (int u = 0; u < prob.u_count; ++u) {
        prob.cols.push_back(column_basis(ru_k[u]));
        if (!(prob.cols.back().lambda_neg < 0.0))
            throw std::runtime_error("jcas: R_u has no negative eigenvalue (degenerate channel) "
                                     "at subcarrier " + std::to_string(k_index));
    }
    if (kind == ConstraintKind::mi) {
        prob.z_center.reserve(prob.u_count);
        for (int u = 0; u < prob.u_count; ++u)
            prob.z_center.push_back(prob.cols[u].basis.transpose() *
                                    realify_vector(center.col(u)));
    }
    return prob;
}

// Rotates each column so its inner product with the matching center column
// is real nonnegative. Column phases leave every metric unchanged, and the
// aligned representative starts the descent on the center-facing side.
Eigen::MatrixXcd phase_align_columns(Eigen::MatrixXcd p, const Eigen::MatrixXcd& center) {
    for (int u = 0; u < p.cols(); ++u) {
        const std::complex<double> inner = p.col(u).dot(center.col(u));
        const double mag = std::abs(inner);
        if (mag > 1e-14) p.col(u) *= inner / mag;
    }
    return p;
}

struct StartPoint {
    Eigen::MatrixXcd p;
    int case_id = 0;  // 1/2 for the MI kind, 3/4 for the CRB kind
};

double psi2_of(const KProblem& prob, const Eigen::MatrixXcd& p) {
    return constraint_psi_dprime(p, prob.q_target, prob.mode);
}

StartPoint initial_point(const KProblem& prob, const Eigen::MatrixXcd& zf_k) {
    const Eigen::MatrixXcd zf = phase_align_columns(zf_k, prob.center);
    StartPoint out;
    if (prob.kind == ConstraintKind::mi) {
        const double dist = (zf - prob.center).squaredNorm();
        if (dist <= prob.rho) {
            out.p = zf;
            out.case_id = 2;
            return out;
        }
        // psi' is exactly (1-t)^2 * dist along the blend, so the crossing
        // point has a closed form.
        const double t = 1.0 - std::sqrt(prob.rho / dist);
        out.p = (1.0 - t) * zf + t * prob.center;
        out.case_id = 1;
        return out;
    }

    if (psi2_of(prob, zf) <= prob.xi) {
        out.p = zf;
        out.case_id = 4;
        return out;
    }
    // Walk the blend toward the covariance factor until psi'' first drops
    // to xi, then bisect the crossing. psi''(center) = 0, so one exists.
    const int grid = 128;
    double t_lo = 0.0;
    double t_hi = -1.0;
    for (int i = 1; i <= grid; ++i) {
        const double t = double(i) / grid;
        const Eigen::MatrixXcd blend = (1.0 - t) * zf + t * prob.center;
        if (psi2_of(prob, blend) <= prob.xi) {
            t_hi = t;
            t_lo = double(i - 1) / grid;
            break;
        }
    }
    if (t_hi < 0.0)
        throw InfeasibleError("find_initial: no psi'' crossing between the zero-forcing "
                              "precoder and the covariance factor");
    for (int it = 0; it < 80; ++it) {
        const double t = 0.5 * (t_lo + t_hi);
        const Eigen::MatrixXcd blend = (1.0 - t) * zf + t * prob.center;
        if (psi2_of(prob, blend) <= prob.xi)
            t_hi = t;
        else
            t_lo = t;
        if (t_hi - t_lo < 1e-10) break;
    }
    out.p = (1.0 - t_hi) * zf + t_hi * prob.center;
    out.case_id = 3;
    return out;
}

// Per-column scaled-eigenvector solution of one subcarrier, when it exists.
// The full-power branch is the per-column optimum of the power-only problem
// and is globally optimal whenever it is radar-feasible; the radar-surface
// branch merely satisfies the constraint pattern and is kept as a candidate.
struct ClosedForm {
    Eigen::MatrixXcd p;
    bool full_power = false;
};

std::optional<ClosedForm> closed_form_k(const KProblem& prob) {
    const int uc = prob.u_count;
    Eigen::MatrixXcd aligned(prob.n, uc);
    for (int u = 0; u < uc; ++u) aligned.col(u) = prob.cols[u].v_neg;
    aligned = phase_align_columns(aligned, prob.center);

    std::optional<ClosedForm> best;
    double best_j = -std::numeric_limits<double>::infinity();
    auto consider = [&](const Eigen::MatrixXcd& p, double j_value, bool full_power) {
        if (j_value > best_j) {
            best = ClosedForm{p, full_power};
            best_j = j_value;
        }
    };

    // Full-power branch: unit columns on the power surface, radar slack.
    {
        double j_value = 0.0;
        for (int u = 0; u < uc; ++u) j_value += -prob.cols[u].lambda_neg;
        const bool ok = prob.kind == ConstraintKind::mi
                            ? (aligned - prob.center).squaredNorm() <= prob.rho
                            : psi2_of(prob, aligned) <= prob.xi;
        if (ok) consider(aligned, j_value, true);
    }

    // Radar-surface branch with power slack.
    if (prob.kind == ConstraintKind::mi) {
        // Equal psi' shares; per-column quadratic in the real scale f.
        Eigen::MatrixXcd p(prob.n, uc);
        double j_value = 0.0;
        bool ok = true;
        for (int u = 0; u < uc && ok; ++u) {
            const double gamma = std::real(aligned.col(u).dot(prob.center.col(u)));
            const double cn2 = prob.center.col(u).squaredNorm();
            const double disc = gamma * gamma - cn2 + prob.rho / double(uc);
            if (disc < 0.0) {
                ok = false;
                break;
            }
            const double r1 = gamma + std::sqrt(disc);
            const double r2 = gamma - std::sqrt(disc);
            double f = std::numeric_limits<double>::quiet_NaN();
            for (const double r : {r1, r2}) {
                if (r * r <= 1.0 + 1e-12 && (!(f == f) || r * r > f * f)) f = r;
            }
            if (!(f == f)) {
                ok = false;
                break;
            }
            p.col(u) = f * aligned.col(u);
            j_value += f * f * -prob.cols[u].lambda_neg;
        }
        if (ok) consider(p, j_value, false);
    } else {
        // Common scale s with psi''(s V) = xi and s^2 U <= U.
        auto psi2_scaled = [&](double s) { return psi2_of(prob, s * aligned); };
        const int grid = 64;
        double prev_s = 0.0;
        double prev_v = psi2_scaled(0.0) - prob.xi;
        double best_s = -1.0;
        for (int i = 1; i <= grid; ++i) {
            const double s = double(i) / grid;
            const double v = psi2_scaled(s) - prob.xi;
            if (prev_v == 0.0) best_s = prev_s;
            if (prev_v * v < 0.0) {
                double lo = prev_s, hi = s;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if ((psi2_scaled(mid) - prob.xi) * prev_v > 0.0)
                        lo = mid;
                    else
                        hi = mid;
                }
                best_s = std::max(best_s, 0.5 * (lo + hi));  // larger scale carries more J
            }
            prev_s = s;
            prev_v = v;
        }
        if (best_s >= 0.0) {
            double j_value = 0.0;
            for (int u = 0; u < uc; ++u) j_value += best_s * best_s * -prob.cols[u].lambda_neg;
            consider(best_s * aligned, j_value, false);
        }
    }
    return best;
}

struct Candidate {
    Eigen::VectorXd z;
    Eigen::VectorXcd p;  // crb kind only
    double negj = 0.0;
    double pow = 0.0;
    double dist = 0.0;   // mi kind
    double psi2 = 0.0;   // crb kind
    double coeff = 0.0;
    int sign = 0;
};

class SubcarrierSolver {
  public:
    SubcarrierSolver(const KProblem& prob, const JcasParams& params)
        : prob_(prob), params_(params), eps_(params.epsilon) {}

    void init(const StartPoint& start) {
        const int uc = prob_.u_count;
        case_ = start.case_id;
        z_.resize(uc);
        p_.resize(uc);
        pow_.assign(uc, 0.0);
        dist_.assign(uc, 0.0);
        negj_.assign(uc, 0.0);
        for (int u = 0; u < uc; ++u) {
            p_[u] = start.p.col(u);
            z_[u] = prob_.cols[u].basis.transpose() * realify_vector(p_[u]);
            pow_[u] = z_[u].squaredNorm();
            negj_[u] = quad(u, z_[u]);
            if (prob_.kind == ConstraintKind::mi)
                dist_[u] = (z_[u] - prob_.z_center[u]).squaredNorm();
        }
        if (prob_.kind == ConstraintKind::crb) {
            cov_ = Eigen::MatrixXcd::Zero(prob_.n, prob_.n);
            for (int u = 0; u < uc; ++u) cov_ += p_[u] * p_[u].adjoint();
            psi2_ = psi2_cov(cov_);
        }
        trace_.start_j_positive = total_negj() < 0.0;
    }

    SubcarrierTrace run() {
        double prev_total = total_negj();
        for (int sweep = 0; sweep < params_.max_iters; ++sweep) {
            trace_.sweeps = sweep + 1;
            blocked_ = false;
            bracket_fail_ = false;
            bool moved = sweep_columns(sweep, /*fallback=*/false);
            // The +-v step set has fixed points where the eigenvector turns
            // normal to the active sphere; a projected-gradient direction
            // escapes them and vanishes exactly at stationary points.
            if (!moved) moved = sweep_columns(sweep, /*fallback=*/true);
            const double total = total_negj();
            const double improvement = prev_total - total;
            prev_total = total;
            const double threshold = params_.stall_tol * std::max(std::abs(total), 1e-30);
            if (moved && improvement >= threshold) continue;

            if (blocked_ && handoffs_ < 8 && moved_since_handoff_ && try_case_switch()) {
                ++handoffs_;
                moved_since_handoff_ = false;
                eps_ = params_.epsilon;  // fresh case, fresh step
                continue;
            }
            if (params_.epsilon_halving && eps_ > kEpsFloor) {
                eps_ *= 0.5;
                continue;
            }
            trace_.termination =
                blocked_ ? "constraint_hit" : (bracket_fail_ ? "bracketing_failure" : "stall");
            trace_.final_neg_j = total;
            trace_.ops = ops_;
            return trace_;
        }
        trace_.termination = "max_iters";
        trace_.final_neg_j = total_negj();
        trace_.ops = ops_;
        return trace_;
    }

    Eigen::MatrixXcd solution() const {
        Eigen::MatrixXcd out(prob_.n, prob_.u_count);
        for (int u = 0; u < prob_.u_count; ++u)
            out.col(u) = prob_.kind == ConstraintKind::crb
                             ? p_[u]
                             : unrealify_vector(prob_.cols[u].basis * z_[u]);
        return out;
    }

  private:
    struct StepDir {
        Eigen::VectorXd z_dir;   // unit direction in the column's eigenbasis
        Eigen::VectorXcd p_dir;  // complex mirror (crb kind)
    };

    bool sweep_columns(int sweep, bool fallback) {
        bool moved = false;
        for (int u = 0; u < prob_.u_count; ++u) {
            std::optional<StepDir> dir;
            if (fallback) {
                dir = gradient_direction(u);
                if (!dir) continue;
            }
            std::optional<Candidate> best;
            for (const int sgn : {+1, -1}) {
                auto cand = make_candidate(u, sgn, fallback ? &*dir : nullptr);
                if (!cand) continue;
                if (cand->negj < negj_[u] && (!best || cand->negj < best->negj))
                    best = std::move(cand);
                if (fallback) break;  // descent direction only
            }
            if (best) {
                accept(u, *best, sweep);
                moved = true;
            }
        }
        return moved;
    }

    // Tangential steepest-descent direction of -J at the current iterate,
    // in the column's eigenbasis. Zero (nullopt) at stationary points.
    std::optional<StepDir> gradient_direction(int u) {
        const auto& eig = prob_.cols[u].eig;
        Eigen::VectorXd g = 2.0 * eig.cwiseProduct(z_[u]);
        ops_ += std::uint64_t(g.size());
        Eigen::VectorXd normal;
        if (case_ == 1)
            normal = z_[u] - prob_.z_center[u];
        else if (case_ == 2 || case_ == 4)
            normal = z_[u];
        if (normal.size() > 0) {
            const double nn = normal.squaredNorm();
            if (nn > 1e-300) g -= (g.dot(normal) / nn) * normal;
            ops_ += 3 * std::uint64_t(g.size());
        }
        const double gn = g.norm();
        if (!(gn > 1e-12 * std::max(1.0, std::abs(negj_[u])))) return std::nullopt;
        StepDir dir;
        dir.z_dir = -g / gn;
        if (prob_.kind == ConstraintKind::crb)
            dir.p_dir = unrealify_vector(prob_.cols[u].basis * dir.z_dir);
        return dir;
    }

    double quad(int u, const Eigen::VectorXd& z) {
        const auto& eig = prob_.cols[u].eig;
        double s = 0.0;
        for (Eigen::Index j = 0; j < z.size(); ++j) s += eig(j) * z(j) * z(j);
        ops_ += std::uint64_t(z.size());
        return s;
    }

    double total_negj() const {
        double s = 0.0;
        for (const double v : negj_) s += v;
        return s;
    }
    double total_pow() const {
        double s = 0.0;
        for (const double v : pow_) s += v;
        return s;
    }
    double total_dist() const {
        double s = 0.0;
        for (const double v : dist_) s += v;
        return s;
    }

    double psi2_cov(const Eigen::MatrixXcd& cov) {
        const Eigen::MatrixXcd delta = cov - prob_.q_target;
        const Eigen::MatrixXd m = delta.real() + delta.imag();
        ops_ += std::uint64_t(m.size());
        return prob_.mode == PsiDprimeMode::determinant ? std::abs(m.determinant()) : m.norm();
    }

    // psi'' with column u replaced by s * p_new, given the covariance with
    // column u already removed.
    double psi2_scaled_column(const Eigen::MatrixXcd& cov_base, const Eigen::MatrixXcd& outer_new,
                              double s) {
        return psi2_cov(cov_base + (s * s) * outer_new);
    }

    std::optional<Candidate> make_candidate(int u, int sgn, const StepDir* dir) {
        Candidate c;
        c.sign = sgn;
        Eigen::VectorXd zp = z_[u];
        if (dir) {
            zp += (sgn * eps_) * dir->z_dir;
            ops_ += std::uint64_t(zp.size());
        } else {
            zp(0) += sgn * eps_;
        }

        switch (case_) {
            case 1: {  // MI sphere: project back along the ray toward the center
                const Eigen::VectorXd& zc = prob_.z_center[u];
                const Eigen::VectorXd d = zp - zc;
                const double dn2 = d.squaredNorm();
                ops_ += std::uint64_t(2 * d.size());
                if (!(dn2 > 1e-300)) return std::nullopt;
                const double s = std::sqrt(dist_[u] / dn2);
                c.z = zc + s * d;
                ops_ += std::uint64_t(2 * d.size());
                c.coeff = 1.0 - s;
                c.dist = dist_[u];
                c.pow = c.z.squaredNorm();
                ops_ += std::uint64_t(c.z.size());
                c.negj = quad(u, c.z);
                if (total_pow() - pow_[u] + c.pow > double(prob_.u_count) + kComplementTol) {
                    if (c.negj < negj_[u]) blocked_ = true;
                    return std::nullopt;
                }
                return c;
            }
            case 2: {  // power sphere: radial rescale to the column's share
                const double pn2 = zp.squaredNorm();
                ops_ += std::uint64_t(zp.size());
                if (!(pn2 > 1e-300)) return std::nullopt;
                const double b = std::sqrt(pow_[u] / pn2);
                c.z = b * zp;
                ops_ += std::uint64_t(zp.size());
                c.coeff = b;
                c.pow = pow_[u];
                c.dist = (c.z - prob_.z_center[u]).squaredNorm();
                ops_ += std::uint64_t(2 * c.z.size());
                c.negj = quad(u, c.z);
                if (total_dist() - dist_[u] + c.dist > prob_.rho + kComplementTol) {
                    if (c.negj < negj_[u]) blocked_ = true;
                    return std::nullopt;
                }
                return c;
            }
            case 3: {  // covariance surface: 1-D root finding in the column scale
                const Eigen::VectorXcd pp =
                    p_[u] + double(sgn) * eps_ * (dir ? dir->p_dir : prob_.cols[u].v_neg);
                ops_ += std::uint64_t(2 * pp.size());
                const double ppn2 = pp.squaredNorm();
                ops_ += std::uint64_t(pp.size());
                if (!(ppn2 > 1e-300)) return std::nullopt;
                const Eigen::MatrixXcd cov_base = cov_ - p_[u] * p_[u].adjoint();
                const Eigen::MatrixXcd outer_new = pp * pp.adjoint();
                ops_ += 2 * std::uint64_t(prob_.n) * std::uint64_t(prob_.n);

                double residual = double(prob_.u_count) - (total_pow() - pow_[u]);
                if (residual < 0.0) residual = 0.0;
                const double s_max = std::sqrt(residual / ppn2);
                const double base_negj = quad(u, zp);

                // Scan for brackets of psi''(s) = xi; the surface is reached
                // through a sign change somewhere below the power cap.
                const int grid = 64;
                double best_s = -1.0;
                double best_negj = std::numeric_limits<double>::infinity();
                double prev_s = 0.0;
                double prev_v = psi2_scaled_column(cov_base, outer_new, 0.0) - prob_.xi;
                for (int i = 1; i <= grid; ++i) {
                    const double s = s_max * double(i) / grid;
                    const double v = psi2_scaled_column(cov_base, outer_new, s) - prob_.xi;
                    if (prev_v * v <= 0.0 && (prev_v != 0.0 || v != 0.0)) {
                        double lo = prev_s, hi = s, vlo = prev_v;
                        for (int it = 0; it < 70; ++it) {
                            const double mid = 0.5 * (lo + hi);
                            const double vm =
                                psi2_scaled_column(cov_base, outer_new, mid) - prob_.xi;
                            if (vlo * vm > 0.0) {
                                lo = mid;
                                vlo = vm;
                            } else {
                                hi = mid;
                            }
                            if (hi - lo < 1e-12 * s_max) break;
                        }
                        const double root = 0.5 * (lo + hi);
                        const double cand_negj = root * root * base_negj;
                        if (cand_negj < best_negj) {
                            best_negj = cand_negj;
                            best_s = root;
                        }
                    }
                    prev_s = s;
                    prev_v = v;
                }
                if (best_s < 0.0) {
                    bracket_fail_ = true;
                    return std::nullopt;
                }
                c.z = best_s * zp;
                c.p = best_s * pp;
                ops_ += std::uint64_t(zp.size() + 2 * pp.size());
                c.coeff = best_s;
                c.pow = best_s * best_s * ppn2;
                c.psi2 = prob_.xi;
                c.negj = best_negj;
                return c;
            }
            case 4: {  // power sphere with the covariance complement
                const Eigen::VectorXcd pp =
                    p_[u] + double(sgn) * eps_ * (dir ? dir->p_dir : prob_.cols[u].v_neg);
                ops_ += std::uint64_t(2 * pp.size());
                const double ppn2 = pp.squaredNorm();
                ops_ += std::uint64_t(pp.size());
                if (!(ppn2 > 1e-300)) return std::nullopt;
                const double b = std::sqrt(pow_[u] / ppn2);
                const Eigen::MatrixXcd cov_base = cov_ - p_[u] * p_[u].adjoint();
                const Eigen::MatrixXcd outer_new = pp * pp.adjoint();
                ops_ += 2 * std::uint64_t(prob_.n) * std::uint64_t(prob_.n);
                c.z = b * zp;
                c.p = b * pp;
                ops_ += std::uint64_t(zp.size() + 2 * pp.size());
                c.coeff = b;
                c.pow = pow_[u];
                c.psi2 = psi2_scaled_column(cov_base, outer_new, b);
                c.negj = quad(u, c.z);
                if (c.psi2 > prob_.xi + kComplementTol) {
                    if (c.negj < negj_[u]) blocked_ = true;
                    return std::nullopt;
                }
                return c;
            }
            default:
                return std::nullopt;
        }
    }

    void accept(int u, const Candidate& c, int sweep) {
        if (prob_.kind == ConstraintKind::crb) {
            cov_ += c.p * c.p.adjoint() - p_[u] * p_[u].adjoint();
            ops_ += 2 * std::uint64_t(prob_.n) * std::uint64_t(prob_.n);
            p_[u] = c.p;
            psi2_ = c.psi2;
        } else {
            dist_[u] = c.dist;
        }
        z_[u] = c.z;
        pow_[u] = c.pow;
        negj_[u] = c.negj;
        moved_since_handoff_ = true;
        if (params_.record_steps) {
            IterationRecord rec;
            rec.sweep = sweep;
            rec.column = u;
            rec.sign = c.sign;
            rec.active = case_ == 1 ? 'm' : (case_ == 3 ? 'c' : 'p');
            rec.scale_coeff = c.coeff;
            rec.neg_j = total_negj();
            trace_.records.push_back(rec);
        }
    }

    // Improving candidates blocked by the inactive constraint mean the
    // descent is pressing against the other surface; the paper's listings
    // then continue in the power-active case. Two mechanisms: when the
    // blocked constraint is met within tolerance the case simply flips (a
    // corner crossing), otherwise the radar-active cases upscale radially
    // onto the power surface (strictly improving when J > 0).
    bool try_case_switch() {
        switch (case_) {
            case 1:
                if (std::abs(total_pow() - double(prob_.u_count)) <= 1e-8) {
                    case_ = 2;
                    return true;
                }
                return try_power_upscale();
            case 2:
                if (std::abs(total_dist() - prob_.rho) <= 1e-8) {
                    case_ = 1;
                    return true;
                }
                return false;
            case 3:
                if (std::abs(total_pow() - double(prob_.u_count)) <= 1e-8) {
                    case_ = 4;
                    return true;
                }
                return try_power_upscale();
            case 4:
                if (std::abs(psi2_ - prob_.xi) <= 1e-8) {
                    case_ = 3;
                    return true;
                }
                return false;
            default:
                return false;
        }
    }

    bool try_power_upscale() {
        const int uc = prob_.u_count;
        const double tp = total_pow();
        if (!(tp > 0.0) || tp >= double(uc) - 1e-15) return false;
        if (!(total_negj() < 0.0)) return false;
        const double g = std::sqrt(double(uc) / tp);

        if (prob_.kind == ConstraintKind::mi) {
            double nd = 0.0;
            for (int u = 0; u < uc; ++u)
                nd += (g * z_[u] - prob_.z_center[u]).squaredNorm();
            ops_ += std::uint64_t(uc) * std::uint64_t(2 * z_[0].size());
            if (nd > prob_.rho + kComplementTol) return false;
            for (int u = 0; u < uc; ++u) {
                z_[u] *= g;
                pow_[u] *= g * g;
                negj_[u] *= g * g;
                dist_[u] = (z_[u] - prob_.z_center[u]).squaredNorm();
            }
            case_ = 2;
            return true;
        }

        const Eigen::MatrixXcd scaled_cov = g * g * cov_;
        const double new_psi2 = psi2_cov(scaled_cov);
        if (new_psi2 > prob_.xi + kComplementTol) return false;
        for (int u = 0; u < uc; ++u) {
            z_[u] *= g;
            p_[u] *= g;
            pow_[u] *= g * g;
            negj_[u] *= g * g;
        }
        cov_ = scaled_cov;
        psi2_ = new_psi2;
        case_ = 4;
        return true;
    }

    const KProblem& prob_;
    const JcasParams& params_;
    double eps_;
    int case_ = 0;
    std::vector<Eigen::VectorXd> z_;
    std::vector<Eigen::VectorXcd> p_;
    Eigen::MatrixXcd cov_;  // P P^H, maintained incrementally (crb kind)
    double psi2_ = 0.0;
    std::vector<double> pow_, dist_, negj_;
    bool blocked_ = false;
    bool bracket_fail_ = false;
    int handoffs_ = 0;
    bool moved_since_handoff_ = true;
    std::uint64_t ops_ = 0;
    SubcarrierTrace trace_;
};

struct ProblemSetup {
    RuSet ru;
    std::vector<Eigen::MatrixXcd> centers;    // per k
    std::vector<Eigen::MatrixXcd> q_targets;  // per k (crb kind)
    PrecoderSet zf;
};

ProblemSetup setup_problem(const CommChannel& comm, const SensingScene& scene,
                           const ScenarioConfig& config, ConstraintKind kind) {
    ProblemSetup setup;
    setup.ru = build_ru(comm, config.mui_weight);
    setup.zf = zero_forcing_precoder(comm);
    if (kind == ConstraintKind::mi) {
        setup.centers = opt_mi_precoder(scene, comm, config.mui_weight).prec.p;
    } else {
        CrbCovariance crb = opt_crb_covariance(scene, config);
        setup.centers.reserve(crb.q.size());
        for (const auto& q : crb.q) setup.centers.push_back(covariance_factor(q, config.n_users));
        setup.q_targets = std::move(crb.q);
    }
    return setup;
}

JcasResult solve(const CommChannel& comm, const SensingScene& scene,
                 const ScenarioConfig& config, const JcasParams& params, ConstraintKind kind) {
    params.validate();
    config.validate();
    const ProblemSetup setup = setup_problem(comm, scene, config, kind);
    const Eigen::MatrixXcd empty;

    JcasResult out;
    out.prec.p.reserve(comm.n_subcarriers());
    out.trace.per_k.reserve(comm.n_subcarriers());
    for (int k = 0; k < comm.n_subcarriers(); ++k) {
        const KProblem prob = build_kproblem(
            kind, setup.ru[k], setup.centers[k],
            kind == ConstraintKind::crb ? setup.q_targets[k] : empty, params, k);

        auto neg_j_of = [&](const Eigen::MatrixXcd& p) {
            double s = 0.0;
            for (int u = 0; u < prob.u_count; ++u) {
                const Eigen::VectorXcd pu = p.col(u);
                s += std::real(pu.dot(setup.ru[k][u] * pu));
            }
            return s;
        };

        std::optional<ClosedForm> cf;
        if (params.use_closed_form) cf = closed_form_k(prob);

        // The full-power eigenvector solution is the per-column optimum of
        // the power-constrained problem; radar feasibility makes it globally
        // optimal, so iteration is skipped. The radar-surface branch is only
        // a feasible candidate and competes with the iterative result.
        if (cf && cf->full_power) {
            SubcarrierTrace trace;
            trace.termination = "closed_form";
            trace.used_closed_form = true;
            trace.final_neg_j = neg_j_of(cf->p);
            out.trace.per_k.push_back(std::move(trace));
            out.prec.p.push_back(std::move(cf->p));
            continue;
        }

        SubcarrierSolver solver(prob, params);
        solver.init(initial_point(prob, setup.zf.p[k]));
        SubcarrierTrace trace = solver.run();
        Eigen::MatrixXcd solution = solver.solution();
        if (cf && neg_j_of(cf->p) < trace.final_neg_j) {
            solution = std::move(cf->p);
            trace.termination = "closed_form";
            trace.used_closed_form = true;
            trace.final_neg_j = neg_j_of(solution);
        }
        out.trace.per_k.push_back(std::move(trace));
        out.prec.p.push_back(std::move(solution));
    }
    return out;
}

}  // namespace

std::optional<PrecoderSet> closed_form_jcas(const CommChannel& comm, const SensingScene& scene,
                                            const ScenarioConfig& config, const JcasParams& params,
                                            ConstraintKind kind) {
    params.validate();
    const ProblemSetup setup = setup_problem(comm, scene, config, kind);
    const Eigen::MatrixXcd empty;
    PrecoderSet out;
    out.p.reserve(comm.n_subcarriers());
    for (int k = 0; k < comm.n_subcarriers(); ++k) {
        const KProblem prob = build_kproblem(
            kind, setup.ru[k], setup.centers[k],
            kind == ConstraintKind::crb ? setup.q_targets[k] : empty, params, k);
        auto cf = closed_form_k(prob);
        if (!cf) return std::nullopt;
        out.p.push_back(std::move(cf->p));
    }
    return out;
}

PrecoderSet find_initial(const CommChannel& comm, const SensingScene& scene,
                         const ScenarioConfig& config, const JcasParams& params,
                         ConstraintKind kind) {
    params.validate();
    const ProblemSetup setup = setup_problem(comm, scene, config, kind);
    const Eigen::MatrixXcd empty;
    PrecoderSet out;
    out.p.reserve(comm.n_subcarriers());
    for (int k = 0; k < comm.n_subcarriers(); ++k) {
        const KProblem prob = build_kproblem(
            kind, setup.ru[k], setup.centers[k],
            kind == ConstraintKind::crb ? setup.q_targets[k] : empty, params, k);
        out.p.push_back(initial_point(prob, setup.zf.p[k]).p);
    }
    return out;
}

JcasResult optimize_mi_constrained(const CommChannel& comm, const SensingScene& scene,
                                   const ScenarioConfig& config, const JcasParams& params) {
    return solve(comm, scene, config, params, ConstraintKind::mi);
}

JcasResult optimize_crb_constrained(const CommChannel& comm, const SensingScene& scene,
                                    const ScenarioConfig& config, const JcasParams& params) {
    return solve(comm, scene, config, params, ConstraintKind::crb);
}

namespace {

// Angle between a vector and the cone spanned by up to two generators
// (nonnegative least squares on two rays).
double cone_angle(const Eigen::VectorXd& g, const Eigen::VectorXd& n1,
                  const Eigen::VectorXd& n2) {
    const double gn = g.norm();
    if (!(gn > 1e-14)) return 0.0;
    auto ray_angle = [&](const Eigen::VectorXd& n) {
        const double nn = n.norm();
        if (!(nn > 1e-14)) return M_PI;
        const double c = std::max(-1.0, std::min(1.0, g.dot(n) / (gn * nn)));
        return std::acos(c);
    };
    double best = std::min(ray_angle(n1), ray_angle(n2));
    // Interior solution a n1 + b n2 with a, b >= 0 from the 2x2 system.
    const double a11 = n1.squaredNorm(), a22 = n2.squaredNorm(), a12 = n1.dot(n2);
    const double det = a11 * a22 - a12 * a12;
    if (det > 1e-20) {
        const double b1 = g.dot(n1), b2 = g.dot(n2);
        const double ca = (a22 * b1 - a12 * b2) / det;
        const double cb = (a11 * b2 - a12 * b1) / det;
        if (ca >= 0.0 && cb >= 0.0) {
            const Eigen::VectorXd proj = ca * n1 + cb * n2;
            if (proj.norm() > 1e-14) {
                const double c =
                    std::max(-1.0, std::min(1.0, g.dot(proj) / (gn * proj.norm())));
                best = std::min(best, std::acos(c));
            }
        }
    }
    return best;
}

}  // namespace

TangencyReport kkt_tangency(const CommChannel& comm, const SensingScene& scene,
                            const ScenarioConfig& config, const JcasParams& params,
                            ConstraintKind kind, const PrecoderSet& solution) {
    const ProblemSetup setup = setup_problem(comm, scene, config, kind);
    TangencyReport out;
    out.angle.resize(comm.n_subcarriers());

    for (int k = 0; k < comm.n_subcarriers(); ++k) {
        const Eigen::MatrixXcd& pk = solution.p[k];
        const double power_residual = std::abs(constraint_psi(pk) - double(comm.n_users()));
        double radar_residual;
        if (kind == ConstraintKind::mi)
            radar_residual = std::abs(constraint_psi_prime(pk, setup.centers[k]) - params.rho);
        else
            radar_residual =
                std::abs(constraint_psi_dprime(pk, setup.q_targets[k], params.psi2_mode) -
                         params.xi);
        // Both surfaces can be active at a corner; tangency then means the
        // objective gradient lies in the cone of the two surface normals.
        const double corner_tol = 1e-6;
        const bool power_active = power_residual <= std::max(radar_residual, corner_tol);
        const bool radar_active = radar_residual <= std::max(power_residual, corner_tol);

        out.angle[k].resize(comm.n_users());
        for (int u = 0; u < comm.n_users(); ++u) {
            const Eigen::VectorXd p_bar = realify_vector(pk.col(u));
            const Eigen::VectorXd grad_negj = 2.0 * realify_vector(setup.ru[k][u] * pk.col(u));

            const Eigen::VectorXd power_normal = p_bar;
            Eigen::VectorXd radar_normal;
            if (kind == ConstraintKind::mi) {
                radar_normal = p_bar - realify_vector(setup.centers[k].col(u));
            } else {
                // Numeric gradient of psi'' in the column's realified coords.
                radar_normal.resize(p_bar.size());
                const double h = 1e-6 * std::max(1.0, p_bar.norm());
                Eigen::MatrixXcd mod = pk;
                for (Eigen::Index i = 0; i < p_bar.size(); ++i) {
                    Eigen::VectorXd pb = p_bar;
                    pb(i) += h;
                    mod.col(u) = unrealify_vector(pb);
                    const double fwd =
                        constraint_psi_dprime(mod, setup.q_targets[k], params.psi2_mode);
                    pb(i) -= 2.0 * h;
                    mod.col(u) = unrealify_vector(pb);
                    const double bwd =
                        constraint_psi_dprime(mod, setup.q_targets[k], params.psi2_mode);
                    radar_normal(i) = (fwd - bwd) / (2.0 * h);
                }
            }

            double angle = 0.0;
            if (power_active && radar_active) {
                angle = cone_angle(-grad_negj, power_normal, radar_normal);
            } else {
                const Eigen::VectorXd& normal = power_active ? power_normal : radar_normal;
                const double gn = grad_negj.norm();
                const double nn = normal.norm();
                if (gn > 1e-14 && nn > 1e-14) {
                    const double c =
                        std::min(1.0, std::abs(grad_negj.dot(normal)) / (gn * nn));
                    angle = std::acos(c);
                }
            }
            out.angle[k][u] = angle;
            out.max_angle = std::max(out.max_angle, angle);
        }
    }
    return out;
}

}  // namespace jcaswave
