#include "usvr/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace usvr {

namespace {

constexpr double kCurvatureFloor = 1e-12;

// Stacked variable order: alpha_0..alpha_{N-1}, beta_0..beta_{N-1}. The
// equality constraint is sum(alpha) - sum(beta) = 0, i.e. sign +1 on the
// alpha block and -1 on the beta block. For variable s with underlying row
// i, F_s is the bias value that would make s exactly optimal:
//   F_alpha_i = y_i - (K theta)_i - rho_i
//   F_beta_i  = y_i - (K theta)_i + rho_i
// Optimality: max_{I_up} F <= b <= min_{I_low} F.

struct Scan {
    double m = -std::numeric_limits<double>::infinity();  // max over I_up
    double M = std::numeric_limits<double>::infinity();   // min over I_low
    bool has_up = false;
    bool has_low = false;
    double interior_sum = 0.0;
    long interior_count = 0;
};

Scan scan_kkt(const QpProblem& pb, const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
              const Eigen::VectorXd& ktheta) {
    Scan s;
    const Eigen::Index N = pb.size();
    for (Eigen::Index i = 0; i < N; ++i) {
        const double c = pb.y[i] - ktheta[i];
        const double lo = pb.alpha_lo(i), hi = pb.alpha_hi(i);
        if (lo < hi) {
            const double F = c - pb.rho[i];
            const bool up = alpha[i] < hi;   // can increase
            const bool low = alpha[i] > lo;  // can decrease
            if (up) {
                s.has_up = true;
                s.m = std::max(s.m, F);
            }
            if (low) {
                s.has_low = true;
                s.M = std::min(s.M, F);
            }
            if (up && low) {
                s.interior_sum += F;
                ++s.interior_count;
            }
        }
        const double blo = pb.beta_lo(i), bhi = pb.beta_hi(i);
        if (blo < bhi) {
            const double F = c + pb.rho[i];
            const bool up = beta[i] > blo;   // beta decreasing raises sum(alpha)-sum(beta)
            const bool low = beta[i] < bhi;  // beta increasing lowers it
            if (up) {
                s.has_up = true;
                s.m = std::max(s.m, F);
            }
            if (low) {
                s.has_low = true;
                s.M = std::min(s.M, F);
            }
            if (up && low) {
                s.interior_sum += F;
                ++s.interior_count;
            }
        }
    }
    return s;
}

double bias_from_scan(const Scan& s) {
    if (s.interior_count > 0) return s.interior_sum / double(s.interior_count);
    if (s.has_up && s.has_low) return 0.5 * (s.m + s.M);
    if (s.has_up) return s.m;
    if (s.has_low) return s.M;
    return 0.0;
}

DualSolution finish(const QpProblem& pb, Eigen::VectorXd alpha, Eigen::VectorXd beta,
                    long iterations) {
    DualSolution out;
    const Eigen::VectorXd theta = alpha - beta;
    const Eigen::VectorXd ktheta = (*pb.gram) * theta;
    out.bias = bias_from_scan(scan_kkt(pb, alpha, beta, ktheta));
    out.objective = 0.5 * theta.dot(ktheta) + pb.rho.dot(alpha + beta) - pb.y.dot(theta);
    out.alpha = std::move(alpha);
    out.beta = std::move(beta);
    out.kkt_violation = kkt_violation(pb, out.alpha, out.beta, out.bias);
    out.iterations = iterations;
    return out;
}

// Greedy repair of sum(alpha) - sum(beta) after a warm start is clipped into
// new boxes. Zero is always inside the boxes, so full passes over one block
// and then the other can absorb any drift.
void repair_equality(const QpProblem& pb, Eigen::VectorXd& alpha, Eigen::VectorXd& beta) {
    const Eigen::Index N = pb.size();
    double drift = alpha.sum() - beta.sum();
    for (Eigen::Index i = 0; i < N && drift > 0.0; ++i) {
        const double d = std::min(drift, alpha[i] - pb.alpha_lo(i));
        alpha[i] -= d;
        drift -= d;
    }
    for (Eigen::Index i = 0; i < N && drift > 0.0; ++i) {
        const double d = std::min(drift, pb.beta_hi(i) - beta[i]);
        beta[i] += d;
        drift -= d;
    }
    for (Eigen::Index i = 0; i < N && drift < 0.0; ++i) {
        const double d = std::min(-drift, beta[i] - pb.beta_lo(i));
        beta[i] -= d;
        drift += d;
    }
    for (Eigen::Index i = 0; i < N && drift < 0.0; ++i) {
        const double d = std::min(-drift, pb.alpha_hi(i) - alpha[i]);
        alpha[i] += d;
        drift += d;
    }
}

}  // namespace

void QpProblem::validate() const {
    if (!gram) throw DimensionError("qp problem has no gram matrix");
    const Eigen::Index N = y.size();
    if (gram->rows() != N || gram->cols() != N)
        throw DimensionError("gram is " + std::to_string(gram->rows()) + "x" +
                             std::to_string(gram->cols()) + " for " + std::to_string(N) +
                             " samples");
    if (rho.size() != N || cost.size() != N || shift_alpha.size() != N || shift_beta.size() != N)
        throw DimensionError("qp problem vectors disagree in length");
    if (n_train < 0 || n_train > N) throw DimensionError("qp problem n_train out of range");
    if (!y.allFinite() || !rho.allFinite() || !cost.allFinite() || !gram->allFinite())
        throw DomainError("qp problem contains non-finite values");
    for (Eigen::Index i = 0; i < N; ++i) {
        if (cost[i] < 0.0) throw DomainError("qp cost must be non-negative");
        if (i < n_train) {
            if (shift_alpha[i] != 0.0 || shift_beta[i] != 0.0)
                throw DomainError("training rows must have zero box shifts");
        } else {
            const bool a_ok = shift_alpha[i] == 0.0 || shift_alpha[i] == cost[i];
            const bool b_ok = shift_beta[i] == 0.0 || shift_beta[i] == cost[i];
            if (!a_ok || !b_ok)
                throw DomainError("universum box shifts must be 0 or the row cost");
            if (shift_alpha[i] != 0.0 && shift_beta[i] != 0.0)
                throw DomainError("universum rows cannot shift both alpha and beta");
        }
    }
    for (Eigen::Index i = 0; i < N; ++i) {
        if ((*gram)(i, i) < -1e-12)
            throw IllPosedProblem("gram diagonal entry " + std::to_string(i) + " is negative");
        for (Eigen::Index j = i + 1; j < N; ++j)
            if ((*gram)(i, j) != (*gram)(j, i))
                throw IllPosedProblem("gram matrix is not symmetric at (" + std::to_string(i) +
                                      ", " + std::to_string(j) + ")");
    }
}

DualSolution solve(const QpProblem& pb, double tol, const Eigen::VectorXd* warm_alpha,
                   const Eigen::VectorXd* warm_beta, long max_iter) {
    pb.validate();
    if (!(tol > 0.0)) throw DomainError("solver tolerance must be positive");
    const Eigen::Index N = pb.size();
    const Eigen::MatrixXd& K = *pb.gram;

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(N);
    if (warm_alpha) {
        if (warm_alpha->size() != N) throw DimensionError("warm start alpha has wrong length");
        for (Eigen::Index i = 0; i < N; ++i)
            alpha[i] = std::clamp((*warm_alpha)[i], pb.alpha_lo(i), pb.alpha_hi(i));
    }
    if (warm_beta) {
        if (warm_beta->size() != N) throw DimensionError("warm start beta has wrong length");
        for (Eigen::Index i = 0; i < N; ++i)
            beta[i] = std::clamp((*warm_beta)[i], pb.beta_lo(i), pb.beta_hi(i));
    }
    repair_equality(pb, alpha, beta);

    if (N == 0) return finish(pb, alpha, beta, 0);

    Eigen::VectorXd ktheta = K * (alpha - beta);
    const double curvature_tol = 1e-8 * std::max(1.0, K.diagonal().maxCoeff());

    long it = 0;
    for (;;) {
        // Maximal violating pair in stacked order; strict comparisons keep
        // the lowest stacked index on ties, making runs bit-reproducible.
        double m = -std::numeric_limits<double>::infinity();
        double M = std::numeric_limits<double>::infinity();
        Eigen::Index s = -1, t = -1;  // stacked indices
        for (Eigen::Index i = 0; i < N; ++i) {
            const double F = pb.y[i] - ktheta[i] - pb.rho[i];
            if (alpha[i] < pb.alpha_hi(i) && F > m) {
                m = F;
                s = i;
            }
            if (alpha[i] > pb.alpha_lo(i) && F < M) {
                M = F;
                t = i;
            }
        }
        for (Eigen::Index i = 0; i < N; ++i) {
            const double F = pb.y[i] - ktheta[i] + pb.rho[i];
            if (beta[i] > pb.beta_lo(i) && F > m) {
                m = F;
                s = N + i;
            }
            if (beta[i] < pb.beta_hi(i) && F < M) {
                M = F;
                t = N + i;
            }
        }
        if (s < 0 || t < 0 || m - M <= tol) break;
        if (it >= max_iter) {
            DualSolution best = finish(pb, alpha, beta, it);
            throw NonConvergence("solver hit the iteration cap (" + std::to_string(max_iter) +
                                     ") with violation " + std::to_string(m - M),
                                 std::move(best));
        }

        const Eigen::Index si = s < N ? s : s - N;
        const Eigen::Index ti = t < N ? t : t - N;
        double a = K(si, si) + K(ti, ti) - 2.0 * K(si, ti);
        if (a < -curvature_tol)
            throw IllPosedProblem("negative curvature along working pair; kernel matrix is not "
                                  "positive semidefinite");
        a = std::max(a, kCurvatureFloor);

        const double room_s = s < N ? pb.alpha_hi(si) - alpha[si] : beta[si] - pb.beta_lo(si);
        const double room_t = t < N ? alpha[ti] - pb.alpha_lo(ti) : pb.beta_hi(ti) - beta[ti];
        const double lam = std::min((m - M) / a, std::min(room_s, room_t));

        if (s < N)
            alpha[si] = (lam == room_s) ? pb.alpha_hi(si) : alpha[si] + lam;
        else
            beta[si] = (lam == room_s) ? pb.beta_lo(si) : beta[si] - lam;
        if (t < N)
            alpha[ti] = (lam == room_t) ? pb.alpha_lo(ti) : alpha[ti] - lam;
        else
            beta[ti] = (lam == room_t) ? pb.beta_hi(ti) : beta[ti] + lam;

        // theta gains +lam on row si and -lam on row ti regardless of block.
        if (si != ti) ktheta.noalias() += lam * (K.col(si) - K.col(ti));
        ++it;
    }
    return finish(pb, alpha, beta, it);
}

namespace {

// Euclidean projection onto {box constraints, sum(alpha) = sum(beta)} by
// bisection on the constraint multiplier; the constraint residual is
// monotone decreasing in nu.
void project_feasible(const QpProblem& pb, Eigen::VectorXd& alpha, Eigen::VectorXd& beta) {
    const Eigen::Index N = pb.size();
    auto residual = [&](double nu, Eigen::VectorXd* pa, Eigen::VectorXd* pb_out) {
        double r = 0.0;
        for (Eigen::Index i = 0; i < N; ++i) {
            const double a = std::clamp(alpha[i] - nu, pb.alpha_lo(i), pb.alpha_hi(i));
            const double b = std::clamp(beta[i] + nu, pb.beta_lo(i), pb.beta_hi(i));
            if (pa) (*pa)[i] = a;
            if (pb_out) (*pb_out)[i] = b;
            r += a - b;
        }
        return r;
    };
    double radius = 1.0;
    for (Eigen::Index i = 0; i < N; ++i)
        radius = std::max({radius, std::abs(alpha[i]), std::abs(beta[i]), pb.cost[i]});
    double lo = -2.0 * radius, hi = 2.0 * radius;
    for (int step = 0; step < 200; ++step) {
        const double mid = 0.5 * (lo + hi);
        if (residual(mid, nullptr, nullptr) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    Eigen::VectorXd na(N), nb(N);
    residual(0.5 * (lo + hi), &na, &nb);
    alpha = na;
    beta = nb;
}

}  // namespace

DualSolution reference_solve(const QpProblem& pb, long iterations) {
    pb.validate();
    const Eigen::Index N = pb.size();
    if (N == 0) return finish(pb, Eigen::VectorXd(), Eigen::VectorXd(), 0);
    const Eigen::MatrixXd& K = *pb.gram;

    // Lipschitz constant of the stacked gradient: the stacked Hessian has
    // eigenvalues {2 lambda_i(K), 0}, so 2 lambda_max(K) suffices. Power
    // iteration from a fixed start keeps this deterministic.
    Eigen::VectorXd v = Eigen::VectorXd::Ones(N).normalized();
    double lam_max = 0.0;
    for (int i = 0; i < 200; ++i) {
        Eigen::VectorXd w = K * v;
        const double norm = w.norm();
        if (norm < 1e-300) break;
        lam_max = norm;
        v = w / norm;
    }
    const double step = 1.0 / std::max(2.2 * lam_max, 1e-8);

    auto objective = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        const Eigen::VectorXd theta = a - b;
        return 0.5 * theta.dot(K * theta) + pb.rho.dot(a + b) - pb.y.dot(theta);
    };

    // FISTA with objective restarts; zero is always feasible, so start there.
    Eigen::VectorXd xa = Eigen::VectorXd::Zero(N), xb = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd ya = xa, yb = xb;
    double t_acc = 1.0;
    double prev_obj = objective(xa, xb);
    for (long k = 0; k < iterations; ++k) {
        const Eigen::VectorXd ktheta = K * (ya - yb);
        Eigen::VectorXd na = ya - step * (ktheta + pb.rho - pb.y);
        Eigen::VectorXd nb = yb - step * (-ktheta + pb.rho + pb.y);
        project_feasible(pb, na, nb);
        const double obj = objective(na, nb);
        if (obj > prev_obj) {  // restart the momentum sequence
            ya = xa;
            yb = xb;
            t_acc = 1.0;
            continue;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_acc * t_acc));
        const double mom = (t_acc - 1.0) / t_next;
        ya = na + mom * (na - xa);
        yb = nb + mom * (nb - xb);
        xa = std::move(na);
        xb = std::move(nb);
        t_acc = t_next;
        prev_obj = obj;
    }
    return finish(pb, xa, xb, iterations);
}

double compute_bias(const QpProblem& pb, const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                    double tol) {
    pb.validate();
    if (alpha.size() != pb.size() || beta.size() != pb.size())
        throw DimensionError("bias: iterate length mismatch");
    const Eigen::VectorXd ktheta = (*pb.gram) * (alpha - beta);
    const Scan s = scan_kkt(pb, alpha, beta, ktheta);
    if (s.has_up && s.has_low && s.m - s.M > tol)
        throw InconsistentSolution("empty bias interval: violation " + std::to_string(s.m - s.M) +
                                   " exceeds tolerance " + std::to_string(tol));
    return bias_from_scan(s);
}

double kkt_violation(const QpProblem& pb, const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                     double bias) {
    const Eigen::Index N = pb.size();
    const Eigen::VectorXd ktheta = (*pb.gram) * (alpha - beta);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < N; ++i) {
        const double c = pb.y[i] - ktheta[i];
        const double alo = pb.alpha_lo(i), ahi = pb.alpha_hi(i);
        if (alo < ahi) {
            const double F = c - pb.rho[i];
            double v;
            if (alpha[i] <= alo)
                v = std::max(0.0, F - bias);  // may still rise: needs F <= b
            else if (alpha[i] >= ahi)
                v = std::max(0.0, bias - F);  // may still fall: needs F >= b
            else
                v = std::abs(F - bias);
            worst = std::max(worst, v);
        }
        const double blo = pb.beta_lo(i), bhi = pb.beta_hi(i);
        if (blo < bhi) {
            const double F = c + pb.rho[i];
            double v;
            if (beta[i] <= blo)
                v = std::max(0.0, bias - F);  // beta can rise: needs F >= b
            else if (beta[i] >= bhi)
                v = std::max(0.0, F - bias);  // beta can fall: needs F <= b
            else
                v = std::abs(F - bias);
            worst = std::max(worst, v);
        }
    }
    return worst;
}

double kkt_violation(const QpProblem& pb, const DualSolution& solution) {
    return kkt_violation(pb, solution.alpha, solution.beta, solution.bias);
}

double objective_value(const QpProblem& pb, const Eigen::VectorXd& alpha,
                       const Eigen::VectorXd& beta) {
    const Eigen::VectorXd theta = alpha - beta;
    return 0.5 * theta.dot((*pb.gram) * theta) + pb.rho.dot(alpha + beta) - pb.y.dot(theta);
}

}  // namespace usvr
